"""
Grafos de comunicação G_psi, G_phi e G_B.

Construção das famílias G0-G4, validação (simetria e conexidade) e as
constantes de conectividade usadas pelos teoremas (diâmetro, tamanho do
complemento, L_G e grau máximo c_B). Nenhuma informação espectral é usada.
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from config import (
    CONVENCAO_COM_DIAGONAL,
    CONVENCOES_COMPLEMENTO,
    DEFAULT_CONVENCAO,
    FAMILIAS_GRAFO,
    MINIMO_VERTICES,
)

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    """Erro genérico de construção ou medição de grafo"""


class DisconnectedGraphError(GraphError):
    """Grafo desconexo onde a conexidade (B2) é exigida"""


class EdgeListError(GraphError):
    """Arquivo de lista de arestas ilegível ou inconsistente"""


@dataclass(frozen=True)
class Graph:
    """
    Grafo com arcos ordenados (i, j), vértices numerados de 1 a N.

    Arestas não direcionadas são guardadas nos dois sentidos, de modo que
    |E| conta pares ordenados (N(N-1) para o grafo completo).
    """

    n_vertices: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphError(f"Número de vértices deve ser positivo: {self.n_vertices}")
        for i, j in self.edges:
            if i == j:
                raise GraphError(f"Laço não permitido: ({i}, {i})")
            if not (1 <= i <= self.n_vertices and 1 <= j <= self.n_vertices):
                raise GraphError(f"Arco ({i}, {j}) fora de 1..{self.n_vertices}")

    @classmethod
    def from_pairs(cls, n_vertices: int, pairs: Iterable[Tuple[int, int]],
                   symmetrize: bool = True) -> "Graph":
        """
        Cria grafo a partir de pares (i, j), opcionalmente adicionando os reversos
        """
        edges = set()
        for i, j in pairs:
            edges.add((int(i), int(j)))
            if symmetrize:
                edges.add((int(j), int(i)))
        return cls(n_vertices, frozenset(edges))

    @cached_property
    def neighbors(self) -> Dict[int, List[int]]:
        """Vizinhança N^i de cada vértice (listas ordenadas)"""
        vizinhos = {i: [] for i in range(1, self.n_vertices + 1)}
        for i, j in sorted(self.edges):
            vizinhos[i].append(j)
        return vizinhos

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Matriz de adjacência densa (índices 0-based), somente leitura"""
        matriz = np.zeros((self.n_vertices, self.n_vertices), dtype=float)
        for i, j in self.edges:
            matriz[i - 1, j - 1] = 1.0
        matriz.setflags(write=False)
        return matriz

    @cached_property
    def degrees(self) -> np.ndarray:
        graus = self.adjacency.sum(axis=1)
        graus.setflags(write=False)
        return graus

    @cached_property
    def edge_index(self) -> Tuple[np.ndarray, np.ndarray]:
        """Arrays (I, J) 0-based dos arcos, em ordem lexicográfica"""
        pares = sorted(self.edges)
        origem = np.array([i - 1 for i, _ in pares], dtype=int)
        destino = np.array([j - 1 for _, j in pares], dtype=int)
        return origem, destino

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GraphMetrics:
    """Constantes de um grafo consumidas pelos teoremas"""

    diameter: Optional[int]
    complement_size: int
    connectivity_constant: Optional[Fraction]
    max_degree: int
    is_connected: bool
    is_symmetric: bool
    convention: str

    def to_dict(self) -> dict:
        return {
            'diameter': self.diameter,
            'complement_size': self.complement_size,
            'connectivity_constant': (
                str(self.connectivity_constant) if self.connectivity_constant is not None else None
            ),
            'connectivity_constant_float': (
                float(self.connectivity_constant) if self.connectivity_constant is not None else None
            ),
            'max_degree': self.max_degree,
            'is_connected': self.is_connected,
            'is_symmetric': self.is_symmetric,
            'convention': self.convention,
        }


def _checar_convencao(convention: str):
    if convention not in CONVENCOES_COMPLEMENTO:
        raise GraphError(
            f"Convenção desconhecida '{convention}'. Use uma de {CONVENCOES_COMPLEMENTO}"
        )


def circulant_offset(n: int) -> int:
    """
    Deslocamento modular da família G3.

    2 para N ímpar, N/2 - 1 para N ≡ 0 (mod 4) e N/2 - 2 para N ≡ 2 (mod 4).
    """
    if n % 2 == 1:
        return 2
    if n % 4 == 0:
        return n // 2 - 1
    return n // 2 - 2


def build_family(family: str, n: int) -> Graph:
    """
    Constrói uma das redes G0-G4 com N vértices

    Args:
        family: Nome da família ('G0', ..., 'G4')
        n: Número de vértices

    Returns:
        Grafo simétrico e conexo
    """
    if family not in FAMILIAS_GRAFO:
        raise GraphError(f"Família desconhecida '{family}'. Disponíveis: {FAMILIAS_GRAFO}")
    minimo = MINIMO_VERTICES[family]
    if n < minimo:
        raise GraphError(f"{family} exige N >= {minimo} (recebido N = {n})")

    vertices = range(1, n + 1)
    pares = set()

    if family == 'G0':
        pares = {(i, j) for i in vertices for j in vertices if i != j}

    elif family == 'G1':
        hubs = {1, n // 2, n} - {0}
        pares = {(i, i + 1) for i in range(1, n)}
        pares |= {(h, j) for h in hubs for j in vertices if j != h}

    elif family == 'G2':
        pares = {(i, i + 1) for i in range(1, n)}

    elif family == 'G3':
        deslocamento = circulant_offset(n)
        pares = {(i, (i - 1 + deslocamento) % n + 1) for i in vertices}

    elif family == 'G4':
        pares = {(i, i % n + 1) for i in vertices}
        hubs = [i for i in vertices if i % 10 == 1]
        pares |= {(h, j) for h in hubs for j in vertices if j != h}

    grafo = Graph.from_pairs(n, ((i, j) for i, j in pares if i != j))
    logger.debug(f"Grafo {family}(N={n}) construído com {grafo.n_edges} arcos")
    return grafo


def closed_form_edge_count(family: str, n: int) -> int:
    """Contagem fechada de arcos ordenados de cada família"""
    if family == 'G0':
        return n * (n - 1)
    if family == 'G1':
        return 8 * n - 22 if n >= 6 else n * (n - 1)
    if family == 'G2':
        return 2 * (n - 1)
    if family == 'G3':
        return 2 * n
    if family == 'G4':
        k = (n + 9) // 10
        total = 2 * n * k - k ** 2 - 5 * k + 2 * n
        return total + 2 if n % 10 == 1 else total
    raise GraphError(f"Família desconhecida '{family}'")


def closed_form_diameter(family: str, n: int) -> int:
    """Diâmetro tabelado de cada família"""
    if family == 'G0':
        return 1
    if family == 'G1':
        return 2 if n >= 6 else 1
    if family == 'G2':
        return n - 1
    if family == 'G3':
        return n // 2
    if family == 'G4':
        return 2 if n >= 4 else 1
    raise GraphError(f"Família desconhecida '{family}'")


def _bfs_distancias(g: Graph, origem: int) -> Dict[int, int]:
    distancias = {origem: 0}
    fila = deque([origem])
    while fila:
        atual = fila.popleft()
        for vizinho in g.neighbors[atual]:
            if vizinho not in distancias:
                distancias[vizinho] = distancias[atual] + 1
                fila.append(vizinho)
    return distancias


def is_symmetric(g: Graph) -> bool:
    return all((j, i) in g.edges for i, j in g.edges)


def is_connected(g: Graph) -> bool:
    return len(_bfs_distancias(g, 1)) == g.n_vertices


def validate(g: Graph) -> Dict[str, bool]:
    """
    Verifica as hipóteses (B1) simetria e (B2) conexidade

    Returns:
        Dicionário {'symmetric': bool, 'connected': bool}
    """
    return {'symmetric': is_symmetric(g), 'connected': is_connected(g)}


def diameter(g: Graph) -> int:
    """
    Diâmetro: maior distância de caminho mínimo entre pares distintos

    Raises:
        DisconnectedGraphError: se algum par não é alcançável
    """
    maior = 0
    for origem in range(1, g.n_vertices + 1):
        distancias = _bfs_distancias(g, origem)
        if len(distancias) < g.n_vertices:
            raise DisconnectedGraphError(
                f"Grafo desconexo: vértice {origem} alcança apenas "
                f"{len(distancias)} de {g.n_vertices} vértices"
            )
        maior = max(maior, max(distancias.values()))
    return maior


def complement_size(g: Graph, convention: str = DEFAULT_CONVENCAO) -> int:
    """
    |E^c| com ou sem os pares diagonais (i, i)
    """
    _checar_convencao(convention)
    n = g.n_vertices
    if convention == CONVENCAO_COM_DIAGONAL:
        return n * n - g.n_edges
    return n * n - n - g.n_edges


def connectivity_constant(g: Graph, convention: str = DEFAULT_CONVENCAO) -> Fraction:
    """
    L_G = 1 / (1 + d(G) |E^c|), valor racional exato
    """
    return Fraction(1, 1 + diameter(g) * complement_size(g, convention))


def max_degree(g: Graph) -> int:
    """Tamanho máximo de vizinhança (c_B quando aplicado a G_B)"""
    return max((len(v) for v in g.neighbors.values()), default=0)


def metrics(g: Graph, convention: str = DEFAULT_CONVENCAO) -> GraphMetrics:
    """
    Calcula todas as métricas; grafos desconexos não geram erro aqui
    """
    _checar_convencao(convention)
    conexo = is_connected(g)
    diam = diameter(g) if conexo else None
    comp = complement_size(g, convention)
    return GraphMetrics(
        diameter=diam,
        complement_size=comp,
        connectivity_constant=Fraction(1, 1 + diam * comp) if conexo else None,
        max_degree=max_degree(g),
        is_connected=conexo,
        is_symmetric=is_symmetric(g),
        convention=convention,
    )


def read_edge_list(path) -> Graph:
    """
    Lê lista de arestas: primeira linha "N", depois um par "i j" por linha

    Args:
        path: Caminho do arquivo

    Returns:
        Grafo lido (os arcos são mantidos como estão, sem simetrizar)
    """
    caminho = Path(path)
    try:
        linhas = caminho.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise EdgeListError(f"Não foi possível ler {caminho}: {e}") from e

    conteudo = [(n, l.strip()) for n, l in enumerate(linhas, 1)
                if l.strip() and not l.strip().startswith('#')]
    if not conteudo:
        raise EdgeListError(f"{caminho}: arquivo vazio")

    try:
        n_vertices = int(conteudo[0][1])
    except ValueError as e:
        raise EdgeListError(f"{caminho}:{conteudo[0][0]}: esperado N, lido '{conteudo[0][1]}'") from e

    pares = []
    for numero, linha in conteudo[1:]:
        partes = linha.split()
        if len(partes) != 2:
            raise EdgeListError(f"{caminho}:{numero}: esperado 'i j', lido '{linha}'")
        try:
            pares.append((int(partes[0]), int(partes[1])))
        except ValueError as e:
            raise EdgeListError(f"{caminho}:{numero}: índices não inteiros em '{linha}'") from e

    try:
        return Graph.from_pairs(n_vertices, pares, symmetrize=False)
    except GraphError as e:
        raise EdgeListError(f"{caminho}: {e}") from e


def write_edge_list(g: Graph, path):
    """Grava o grafo no formato de lista de arestas (ambos os sentidos)"""
    linhas = [str(g.n_vertices)] + [f"{i} {j}" for i, j in sorted(g.edges)]
    Path(path).write_text("\n".join(linhas) + "\n", encoding='utf-8')
    logger.info(f"✅ Lista de arestas salva: {path}")


def resolve_graph(spec: str, n: int) -> Graph:
    """
    Resolve uma especificação de grafo: nome de família ou caminho de lista de arestas
    """
    spec = spec.strip()
    if spec in FAMILIAS_GRAFO:
        return build_family(spec, n)
    caminho = spec[5:] if spec.startswith('file:') else spec
    grafo = read_edge_list(caminho)
    if grafo.n_vertices != n:
        raise EdgeListError(f"{caminho}: grafo com {grafo.n_vertices} vértices, esperado {n}")
    return grafo


def validated_or_raise(g: Graph, papel: str = "grafo"):
    """Garante (B1) e (B2), levantando erro que identifica o papel do grafo"""
    resultado = validate(g)
    if not resultado['symmetric']:
        raise GraphError(f"{papel}: grafo não simétrico (B1)")
    if not resultado['connected']:
        raise DisconnectedGraphError(f"{papel}: grafo desconexo (B2)")
