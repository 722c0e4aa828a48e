"""
Figuras estáticas das séries do ensemble e dos snapshots de posição
"""

import logging
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns

logger = logging.getLogger(__name__)

sns.set_theme(style='whitegrid')


def _faixa(ax, t, media, se, rotulo, cor):
    ax.plot(t, media, label=rotulo, color=cor)
    ax.fill_between(t, np.maximum(media - 3 * se, 1e-300), media + 3 * se, color=cor, alpha=0.2)


def plot_energies(series, caminho) -> Path:
    """H, J e energia cinética em escala logarítmica, com faixa de 3 SE"""
    fig, ax = plt.subplots(figsize=(10, 6))
    t = series.times
    cores = sns.color_palette('deep', 3)
    _faixa(ax, t, series.mean('kinetic'), series.se('kinetic'), 'E||v||²', cores[0])
    _faixa(ax, t, series.mean('H'), series.se('H'), 'H', cores[1])
    if not np.all(np.isnan(series.mean('J'))):
        _faixa(ax, t, series.mean('J'), series.se('J'), 'J', cores[2])
    ax.set_yscale('log')
    ax.set_xlabel('t')
    ax.set_title('Funcionais de energia')
    ax.legend()
    fig.tight_layout()
    fig.savefig(caminho, dpi=150)
    plt.close(fig)
    return Path(caminho)


def plot_sandwich(series, caminho) -> Path:
    """J entre c0 H e c1 H"""
    fig, ax = plt.subplots(figsize=(10, 6))
    t = series.times
    ax.fill_between(t, series.mean('c0H'), series.mean('c1H'), alpha=0.25, label='[c0 H, c1 H]')
    ax.plot(t, series.mean('J'), color='black', label='J')
    ax.set_yscale('log')
    ax.set_xlabel('t')
    ax.set_title('Equivalência entre J e H')
    ax.legend()
    fig.tight_layout()
    fig.savefig(caminho, dpi=150)
    plt.close(fig)
    return Path(caminho)


def plot_snapshot(estado, alvos: np.ndarray, caminho) -> Path:
    """Posições (primeiras duas coordenadas) sobre o padrão-alvo"""
    fig, ax = plt.subplots(figsize=(7, 7))
    ax.scatter(alvos[:, 0], alvos[:, 1], marker='x', color='gray', label='z')
    ax.quiver(estado.x[:, 0], estado.x[:, 1], estado.v[:, 0], estado.v[:, 1],
              color=sns.color_palette('deep')[0], angles='xy')
    ax.scatter(estado.x[:, 0], estado.x[:, 1], s=12, label='x')
    ax.set_aspect('equal')
    ax.set_title(f't = {estado.t:.3f}')
    ax.legend()
    fig.tight_layout()
    fig.savefig(caminho, dpi=150)
    plt.close(fig)
    return Path(caminho)


def save_all(series, params, diretorio) -> List[Path]:
    """Gera todas as figuras disponíveis em PNG"""
    diretorio = Path(diretorio)
    caminhos = [plot_energies(series, diretorio / 'energies.png')]
    if not np.all(np.isnan(series.mean('c0H'))):
        caminhos.append(plot_sandwich(series, diretorio / 'sandwich.png'))
    if params.dim >= 2:
        for indice, estados in sorted(series.snapshots.items()):
            for estado in estados:
                nome = f'snapshot_t{estado.t:.4f}_r{indice}.png'
                caminhos.append(plot_snapshot(estado, params.targets, diretorio / nome))
    logger.info(f"🖼️ {len(caminhos)} figura(s) salvas em {diretorio}")
    return caminhos


def plot_compare_energies(comparison, caminho) -> Path:
    """H(t) e J(t) sobrepostos, uma curva por família de G_phi"""
    fig, (ax_h, ax_j) = plt.subplots(1, 2, figsize=(14, 6), sharex=True)
    cores = sns.color_palette('deep', len(comparison.families))
    for cor, (familia, serie) in zip(cores, comparison.series.items()):
        t = serie.times
        _faixa(ax_h, t, serie.mean('H'), serie.se('H'), familia, cor)
        if not np.all(np.isnan(serie.mean('J'))):
            _faixa(ax_j, t, serie.mean('J'), serie.se('J'), familia, cor)
    for ax, titulo in ((ax_h, 'H por rede de controle'), (ax_j, 'J por rede de controle')):
        ax.set_yscale('log')
        ax.set_xlabel('t')
        ax.set_title(titulo)
        ax.legend(title='G_phi')
    fig.tight_layout()
    fig.savefig(caminho, dpi=150)
    plt.close(fig)
    return Path(caminho)


def plot_compare_sandwich(comparison, caminho) -> Optional[Path]:
    """Faixa [c0 H, c1 H] e J de cada família; None se nenhuma tem constantes"""
    validas = {f: s for f, s in comparison.series.items() if not np.all(np.isnan(s.mean('c0H')))}
    if not validas:
        return None
    fig, ax = plt.subplots(figsize=(10, 6))
    cores = sns.color_palette('deep', len(comparison.families))
    for cor, familia in zip(cores, comparison.families):
        if familia not in validas:
            continue
        serie = validas[familia]
        t = serie.times
        ax.fill_between(t, serie.mean('c0H'), serie.mean('c1H'), color=cor, alpha=0.15)
        ax.plot(t, serie.mean('J'), color=cor, label=familia)
    ax.set_yscale('log')
    ax.set_xlabel('t')
    ax.set_title('c0 H <= J <= c1 H por rede de controle')
    ax.legend(title='G_phi')
    fig.tight_layout()
    fig.savefig(caminho, dpi=150)
    plt.close(fig)
    return Path(caminho)


def save_compare(comparison, diretorio) -> List[Path]:
    """Figuras da varredura de G_phi em PNG"""
    diretorio = Path(diretorio)
    caminhos = [plot_compare_energies(comparison, diretorio / 'compare_energies.png')]
    faixa = plot_compare_sandwich(comparison, diretorio / 'compare_sandwich.png')
    if faixa is not None:
        caminhos.append(faixa)
    logger.info(f"🖼️ {len(caminhos)} figura(s) de comparação salvas em {diretorio}")
    return caminhos
