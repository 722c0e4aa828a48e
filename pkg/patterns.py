"""
Configurações-alvo z (padrões espaciais desejados)

Padrões embutidos:
- pi{N}:   N pontos amostrados por comprimento de arco sobre um glifo "pi"
           contido em [-212.125, 212.125]^2
- ring{N}: N pontos igualmente espaçados num círculo

Qualquer outro padrão vem de um CSV sem cabeçalho (N linhas, d colunas).
"""

import logging
import re
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

PADRAO_EMBUTIDO = re.compile(r"^(pi|ring)(\d+)$")

# Traços do glifo em coordenadas normalizadas [-1, 1]^2
_TRACOS_PI = [
    np.array([[-0.95, 0.62], [-0.80, 0.74], [-0.55, 0.78], [0.95, 0.78]]),
    np.array([[-0.40, 0.78], [-0.42, 0.20], [-0.50, -0.40], [-0.68, -0.82]]),
    np.array([[0.38, 0.78], [0.36, 0.00], [0.40, -0.60], [0.55, -0.82], [0.78, -0.74]]),
]
_ESCALA_PI = 200.0
_RAIO_ANEL = 150.0


class PatternError(ValueError):
    """Padrão-alvo inválido ou incompatível com (N, d)"""


def _amostrar_tracos(tracos: List[np.ndarray], n: int) -> np.ndarray:
    """Distribui n pontos pelo comprimento de arco total dos traços"""
    segmentos = np.concatenate([np.stack((t[:-1], t[1:]), axis=1) for t in tracos])
    comprimentos = np.linalg.norm(segmentos[:, 1] - segmentos[:, 0], axis=1)
    acumulado = np.concatenate(([0.0], np.cumsum(comprimentos)))
    posicoes = (np.arange(n) + 0.5) * acumulado[-1] / n
    k = np.clip(np.searchsorted(acumulado, posicoes, side='right') - 1, 0, len(segmentos) - 1)
    frac = (posicoes - acumulado[k]) / comprimentos[k]
    return segmentos[k, 0] + frac[:, None] * (segmentos[k, 1] - segmentos[k, 0])


def pi_pattern(n: int) -> np.ndarray:
    """Glifo pi com n pontos (matriz n x 2)"""
    if n < 1:
        raise PatternError(f"Número de pontos deve ser positivo: {n}")
    return _ESCALA_PI * _amostrar_tracos(_TRACOS_PI, n)


def ring_pattern(n: int) -> np.ndarray:
    if n < 1:
        raise PatternError(f"Número de pontos deve ser positivo: {n}")
    angulos = 2.0 * np.pi * np.arange(n) / n
    return _RAIO_ANEL * np.column_stack((np.cos(angulos), np.sin(angulos)))


def builtin_pattern(nome: str) -> Optional[np.ndarray]:
    """Padrão embutido pelo nome, ou None se o nome não for de um embutido"""
    casamento = PADRAO_EMBUTIDO.match(nome.strip())
    if not casamento:
        return None
    familia, n = casamento.group(1), int(casamento.group(2))
    return pi_pattern(n) if familia == 'pi' else ring_pattern(n)


def load_targets(path, n: Optional[int] = None, d: Optional[int] = None) -> np.ndarray:
    """
    Carrega o vetor z de um CSV sem cabeçalho

    Args:
        path: Caminho do arquivo (linhas iniciadas por '#' são ignoradas)
        n: Número de agentes esperado (opcional)
        d: Dimensão esperada (opcional)

    Returns:
        Matriz n x d com os alvos

    Raises:
        PatternError: arquivo ausente, células não numéricas ou dimensões erradas
    """
    caminho = Path(path)
    if not caminho.exists():
        raise PatternError(f"Arquivo de alvos não encontrado: {caminho}")

    try:
        df = pd.read_csv(caminho, header=None, comment='#', skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise PatternError(f"Arquivo de alvos vazio: {caminho}") from e
    except pd.errors.ParserError as e:
        raise PatternError(f"Número de colunas irregular em {caminho}: {e}") from e

    convertido = df.apply(pd.to_numeric, errors='coerce')
    if convertido.isna().any().any():
        linha, coluna = np.argwhere(convertido.isna().to_numpy())[0]
        raise PatternError(
            f"Célula não numérica em {caminho}: linha {linha + 1}, coluna {coluna + 1} "
            f"('{df.iat[linha, coluna]}')"
        )

    alvos = convertido.to_numpy(dtype=float)
    if n is not None and alvos.shape[0] != n:
        raise PatternError(f"{caminho} tem {alvos.shape[0]} linhas, esperado N = {n}")
    if d is not None and alvos.shape[1] != d:
        raise PatternError(f"{caminho} tem {alvos.shape[1]} colunas, esperado d = {d}")

    logger.info(f"✅ Alvos carregados de {caminho}: {alvos.shape[0]} x {alvos.shape[1]}")
    return alvos


def resolve_targets(spec: str, n: int, d: int, base_dir: Optional[Path] = None) -> np.ndarray:
    """
    Resolve um nome de padrão embutido ou um caminho de CSV

    Raises:
        PatternError: embutido com N ou d incompatível, ou erro do arquivo
    """
    embutido = builtin_pattern(spec)
    if embutido is not None:
        if embutido.shape[0] != n:
            raise PatternError(f"Padrão '{spec}' tem {embutido.shape[0]} pontos, esperado N = {n}")
        if d != 2:
            raise PatternError(f"Padrão embutido '{spec}' é planar, mas d = {d}")
        return embutido

    caminho = Path(spec)
    if base_dir is not None and not caminho.is_absolute():
        caminho = base_dir / caminho
    return load_targets(caminho, n, d)
