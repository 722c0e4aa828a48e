"""
Funções utilitárias de saída: CSV em precisão completa, resumo JSON,
snapshots por agente e relatórios no log.
"""

import json
import logging
import math
from datetime import datetime
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterable, List

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT, FILE_ENCODING_OUTPUT, PREFIXO_SNAPSHOT

logger = logging.getLogger(__name__)

PACOTES_VERSAO = ('numpy', 'pandas', 'scipy', 'matplotlib', 'seaborn')


def preparar_diretorio(caminho) -> Path:
    diretorio = Path(caminho)
    diretorio.mkdir(parents=True, exist_ok=True)
    return diretorio


def salvar_csv(df: pd.DataFrame, caminho) -> Path:
    """
    Salva DataFrame com floats em notação científica de 17 dígitos

    Args:
        df: Tabela a salvar
        caminho: Arquivo de destino

    Returns:
        Caminho escrito
    """
    caminho = Path(caminho)
    df.to_csv(caminho, index=False, float_format=CSV_FLOAT_FORMAT, encoding=FILE_ENCODING_OUTPUT)
    logger.info(f"💾 Salvo: {caminho} ({df.shape[0]} linhas x {df.shape[1]} colunas)")
    return caminho


def _serializavel(valor):
    """Converte tipos numpy e floats não finitos para JSON"""
    if isinstance(valor, dict):
        return {str(k): _serializavel(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_serializavel(v) for v in valor]
    if isinstance(valor, np.ndarray):
        return _serializavel(valor.tolist())
    if isinstance(valor, (np.bool_, bool)):
        return bool(valor)
    if isinstance(valor, (np.integer, int)):
        return int(valor)
    if isinstance(valor, (np.floating, float)):
        valor = float(valor)
        if math.isnan(valor):
            return None
        if math.isinf(valor):
            return 'inf' if valor > 0 else '-inf'
        return valor
    if isinstance(valor, Path):
        return str(valor)
    return valor


def salvar_json(dados: dict, caminho) -> Path:
    caminho = Path(caminho)
    with open(caminho, 'w', encoding=FILE_ENCODING_OUTPUT) as f:
        json.dump(_serializavel(dados), f, indent=2, ensure_ascii=False)
    logger.info(f"💾 Salvo: {caminho}")
    return caminho


def write_energies(series, caminho) -> Path:
    """energies.csv: exatamente as colunas do experimento"""
    return salvar_csv(series.energies_frame(), caminho)


def write_diagnostics(series, caminho) -> Path:
    """Todas as médias e erros padrão da série"""
    return salvar_csv(series.frame, caminho)


def snapshot_frame(estado) -> pd.DataFrame:
    """Uma linha por agente: i, x_1..x_d, v_1..v_d"""
    n, d = estado.x.shape
    dados = {'i': np.arange(1, n + 1)}
    for k in range(d):
        dados[f'x_{k + 1}'] = estado.x[:, k]
    for k in range(d):
        dados[f'v_{k + 1}'] = estado.v[:, k]
    return pd.DataFrame(dados)


def write_snapshots(series, diretorio) -> List[Path]:
    """
    Um CSV por (realização, instante) guardado na série

    Nome: snapshot_t<instante>_r<realização>.csv
    """
    diretorio = preparar_diretorio(diretorio)
    caminhos = []
    for indice, estados in sorted(series.snapshots.items()):
        for estado in estados:
            nome = f"{PREFIXO_SNAPSHOT}{estado.t:.4f}_r{indice}.csv"
            caminhos.append(salvar_csv(snapshot_frame(estado), diretorio / nome))
    return caminhos


def versoes_pacotes(pacotes: Iterable[str] = PACOTES_VERSAO) -> Dict[str, str]:
    versoes = {}
    for pacote in pacotes:
        try:
            versoes[pacote] = metadata.version(pacote)
        except metadata.PackageNotFoundError:
            versoes[pacote] = 'ausente'
    return versoes


def carimbo_tempo() -> str:
    return datetime.now().strftime('%Y-%m-%d %H:%M:%S')


def imprimir_relatorio(titulo: str, dados: dict):
    """
    Escreve um relatório chave-valor no log
    """
    logger.info(f"\n📊 {titulo.upper()}")
    logger.info("-" * 50)
    for chave, valor in dados.items():
        if isinstance(valor, dict) and 'passed' in valor:
            passou = valor['passed']
            marca = '✅' if passou else ('⚠️' if passou is None else '❌')
            detalhes = {k: v for k, v in valor.items() if k != 'passed'}
            logger.info(f"  {marca} {chave}: {detalhes}")
        elif isinstance(valor, float):
            logger.info(f"  {chave}: {valor:.6e}")
        else:
            logger.info(f"  {chave}: {valor}")
