"""
Modelo Cucker-Smale estocástico com sinal de controle em redes.

    dx^i = v^i dt
    dv^i = K sum_{j in N_psi^i} psi(|x^j - x^i|)(v^j - v^i) dt + M u^i dt
           + sigma sum_{j in N_B^i}(v^j - v^i) dB_t

com u^i = sum_{j in N_phi^i} phi(|xb^j - xb^i|^2)(xb^j - xb^i), xb^i = x^i - z^i.
Um único movimento browniano escalar B_t é compartilhado por todos os agentes.

Também calcula as constantes analíticas dos teoremas (lambda, limiar de
acoplamento, gamma, alpha, beta, c0, c1, c2, p, q) e verifica as hipóteses.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_CONVENCAO, DEFAULT_MARGEM_BETA
from graph import (
    Graph,
    complement_size,
    connectivity_constant,
    diameter,
    max_degree,
    validate,
    validated_or_raise,
)
from kernels import CommunicationKernel

logger = logging.getLogger(__name__)


class ModelError(ValueError):
    """Parâmetros ou estados inconsistentes"""


class HypothesisError(ModelError):
    """Hipótese de um teorema violada"""

    def __init__(self, condicao: str, detalhe: str = ""):
        super().__init__(f"Hipótese violada: {condicao}" + (f" ({detalhe})" if detalhe else ""))
        self.condition = condicao


@dataclass(frozen=True)
class ModelParams:
    """Todos os escalares e estruturas que definem o sistema"""

    n_agents: int
    dim: int
    coupling: float
    control_strength: float
    noise_strength: float
    g_psi: Graph
    g_phi: Graph
    g_b: Graph
    psi: CommunicationKernel
    phi: CommunicationKernel
    targets: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        if self.n_agents < 1 or self.dim < 1:
            raise ModelError(f"N e d devem ser positivos (N={self.n_agents}, d={self.dim})")
        for nome, valor in (('K', self.coupling), ('M', self.control_strength),
                            ('sigma', self.noise_strength)):
            if not math.isfinite(valor) or valor < 0:
                raise ModelError(f"{nome} deve ser finito e >= 0 (recebido {valor})")
        for papel, g in (('G_psi', self.g_psi), ('G_phi', self.g_phi), ('G_B', self.g_b)):
            if g.n_vertices != self.n_agents:
                raise ModelError(f"{papel} tem {g.n_vertices} vértices, esperado N = {self.n_agents}")
            validated_or_raise(g, papel)

        alvos = np.array(self.targets, dtype=float)
        if alvos.shape != (self.n_agents, self.dim):
            raise ModelError(
                f"Alvos z com forma {alvos.shape}, esperado ({self.n_agents}, {self.dim})"
            )
        if not np.all(np.isfinite(alvos)):
            raise ModelError("Alvos z com entradas não finitas")
        alvos.setflags(write=False)
        object.__setattr__(self, 'targets', alvos)

    @property
    def shares_noise_graph(self) -> bool:
        """G_psi = G_B (ruído herdado da força de alinhamento)"""
        return self.g_psi == self.g_b


@dataclass(frozen=True)
class SwarmState:
    """Posições x, velocidades v (matrizes N x d) e tempo t de uma realização"""

    x: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        v = np.array(self.v, dtype=float)
        if x.ndim != 2 or x.shape != v.shape:
            raise ModelError(f"x e v devem ser matrizes N x d de mesma forma ({x.shape} vs {v.shape})")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'v', v)
        object.__setattr__(self, 't', float(self.t))

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v)))


@dataclass(frozen=True)
class AnalysisConstants:
    """Constantes da prova do decaimento exponencial, com a convenção usada"""

    lam: float
    k_threshold: float
    gamma: float
    beta_min: float
    beta: float
    alpha: float
    c0: float
    c1: float
    c2: float
    p: float
    q: float
    l_psi: float
    l_phi: float
    c_b: int
    convention: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class InitialConditionReport:
    """Resultado da condição sobre os dados iniciais"""

    status: str
    lhs: float
    rhs: float
    rhs_se: float
    n_samples: int

    def to_dict(self) -> dict:
        return asdict(self)


def _checar_estado(params: ModelParams, state: SwarmState):
    esperado = (params.n_agents, params.dim)
    if state.x.shape != esperado:
        raise ModelError(f"Estado com forma {state.x.shape}, esperado {esperado}")


def _diferencas(y: np.ndarray) -> np.ndarray:
    """Tensor D[i, j] = y^j - y^i"""
    return y[None, :, :] - y[:, None, :]


def control_signal(params: ModelParams, state: SwarmState) -> np.ndarray:
    """
    Sinal de controle u (N x d) que empurra as posições para o padrão z

    Args:
        params: Parâmetros do modelo
        state: Estado atual

    Returns:
        Matriz u com u^i = sum_j phi(|xb^j - xb^i|^2)(xb^j - xb^i)
    """
    _checar_estado(params, state)
    desvio = _diferencas(state.x - params.targets)
    pesos = params.g_phi.adjacency * params.phi.eval(np.einsum('ijk,ijk->ij', desvio, desvio))
    return np.einsum('ij,ijk->ik', pesos, desvio)


def drift(params: ModelParams, state: SwarmState) -> Tuple[np.ndarray, np.ndarray]:
    """
    Parte determinística (dx, dv) do sistema
    """
    _checar_estado(params, state)
    distancias = np.linalg.norm(_diferencas(state.x), axis=2)
    pesos = params.g_psi.adjacency * params.psi.eval(distancias)
    dv = params.coupling * np.einsum('ij,ijk->ik', pesos, _diferencas(state.v))
    if params.control_strength != 0.0:
        dv = dv + params.control_strength * control_signal(params, state)
    return state.v.copy(), dv


def diffusion(params: ModelParams, state: SwarmState) -> np.ndarray:
    """
    Coeficiente do ruído comum: linha i = sigma sum_{j in N_B^i}(v^j - v^i)

    O mesmo incremento escalar dB multiplica todas as linhas.
    """
    _checar_estado(params, state)
    if params.noise_strength == 0.0:
        return np.zeros_like(state.v)
    return params.noise_strength * np.einsum('ij,ijk->ik', params.g_b.adjacency, _diferencas(state.v))


def phi_potential(params: ModelParams, x: np.ndarray) -> float:
    """sum_{(i,j) in E_phi} Phi(|xb^ij|^2)"""
    origem, destino = params.g_phi.edge_index
    desvio = x - params.targets
    diferenca = desvio[destino] - desvio[origem]
    return float(params.phi.antiderivative_many(np.einsum('ek,ek->e', diferenca, diferenca)).sum())


def energy_rate_terms(params: ModelParams, state: SwarmState) -> Dict[str, float]:
    """
    Termos da identidade de energia cinética d||v||^2/dt

    Returns:
        Dicionário com 'alignment' (<= 0), 'noise' (>= 0) e 'control'
    """
    _checar_estado(params, state)
    dx = _diferencas(state.x)
    dv = _diferencas(state.v)
    desvio = _diferencas(state.x - params.targets)

    psi_w = params.g_psi.adjacency * params.psi.eval(np.linalg.norm(dx, axis=2))
    alinhamento = -params.coupling * float(np.sum(psi_w * np.einsum('ijk,ijk->ij', dv, dv)))

    soma_ruido = np.einsum('ij,ijk->ik', params.g_b.adjacency, dv)
    ruido = params.noise_strength ** 2 * float(np.sum(soma_ruido ** 2))

    phi_w = params.g_phi.adjacency * params.phi.eval(np.einsum('ijk,ijk->ij', desvio, desvio))
    controle = -params.control_strength * float(np.sum(phi_w * np.einsum('ijk,ijk->ij', desvio, dv)))

    return {'alignment': alinhamento, 'noise': ruido, 'control': controle}


# Constantes analíticas

def lambda_constant(params: ModelParams, convention: str = DEFAULT_CONVENCAO) -> float:
    """
    lambda = psi_min L_{G_psi} K - sigma^2 c_B (pode ser <= 0; quem chama decide)
    """
    l_psi = float(connectivity_constant(params.g_psi, convention))
    return params.psi.inf * l_psi * params.coupling - params.noise_strength ** 2 * max_degree(params.g_b)


def coupling_threshold(params: ModelParams, convention: str = DEFAULT_CONVENCAO) -> float:
    """
    Limiar de acoplamento (sigma^2 c_B / psi_min)(1 + d(G_psi)|E_psi^c|)

    Raises:
        HypothesisError: psi_min = 0 (hipótese (A))
    """
    if params.psi.inf <= 0:
        raise HypothesisError("psi_min > 0", f"psi = {params.psi}")
    base = params.noise_strength ** 2 * max_degree(params.g_b) / params.psi.inf
    return base * (1 + diameter(params.g_psi) * complement_size(params.g_psi, convention))


def same_graph_threshold(params: ModelParams) -> float:
    """Limiar sigma^2 c_B / psi_min, válido quando G_psi = G_B"""
    if params.psi.inf <= 0:
        raise HypothesisError("psi_min > 0", f"psi = {params.psi}")
    return params.noise_strength ** 2 * max_degree(params.g_b) / params.psi.inf


def _lado_direito_inicial(params: ModelParams, initial_ensemble: Sequence[SwarmState]) -> np.ndarray:
    valores = []
    for estado in initial_ensemble:
        _checar_estado(params, estado)
        cinetica = float(np.sum(estado.v ** 2))
        if params.control_strength > 0:
            termo_v = 2.0 / params.control_strength * cinetica
        else:
            termo_v = math.inf if cinetica > 0 else 0.0
        valores.append(termo_v + phi_potential(params, estado.x))
    return np.array(valores)


def initial_condition_rhs(params: ModelParams,
                          initial_ensemble: Sequence[SwarmState]) -> Tuple[float, float]:
    """
    Lado direito (2/M) E||v0||^2 + sum E Phi(|xb0^ij|^2) e seu erro padrão
    """
    if not initial_ensemble:
        raise ModelError("Ensemble inicial vazio")
    amostras = _lado_direito_inicial(params, initial_ensemble)
    media = float(np.mean(amostras))
    if len(amostras) > 1 and math.isfinite(media):
        erro = float(np.std(amostras, ddof=1) / math.sqrt(len(amostras)))
    else:
        erro = 0.0
    return media, erro


def initial_condition_check(params: ModelParams,
                            initial_ensemble: Sequence[SwarmState]) -> InitialConditionReport:
    """
    Condição sobre os dados iniciais: int_0^inf phi > RHS

    Args:
        params: Parâmetros do modelo
        initial_ensemble: Estados iniciais (um estado determinístico = ensemble de tamanho 1)

    Returns:
        Relatório com status 'satisfied', 'violated' ou 'trivially_satisfied'
    """
    rhs, rhs_se = initial_condition_rhs(params, initial_ensemble)
    lhs = params.phi.integral_to_infinity()

    if params.phi.tail_integral_diverges():
        status = 'trivially_satisfied'
    elif lhs > rhs:
        status = 'satisfied'
    else:
        status = 'violated'

    logger.debug(f"Condição inicial: LHS = {lhs}, RHS = {rhs} ± {rhs_se} -> {status}")
    return InitialConditionReport(status=status, lhs=lhs, rhs=rhs, rhs_se=rhs_se,
                                  n_samples=len(initial_ensemble))


def analysis_constants(params: ModelParams, convention: str = DEFAULT_CONVENCAO,
                       margin: float = DEFAULT_MARGEM_BETA,
                       beta_override: Optional[float] = None) -> AnalysisConstants:
    """
    Constantes da prova do decaimento exponencial de H

    beta = beta_min (1 + margin) salvo override; alpha = beta M / 2;
    c0, c1 da equivalência c0 H <= J <= c1 H; c2 da taxa de dissipação;
    p = c1 / c0 e q = c2 / c1.

    Raises:
        HypothesisError: lambda <= 0, phi_min = 0, K <= 0 ou M <= 0, ou beta
            fornecido que não torna c0 e c2 positivos
    """
    n = params.n_agents
    k_acop = params.coupling
    m_ctrl = params.control_strength
    psi_max, phi_min, phi_max = params.psi.sup, params.phi.inf, params.phi.sup

    if k_acop <= 0:
        raise HypothesisError("K > 0")
    if m_ctrl <= 0:
        raise HypothesisError("M > 0")
    if phi_min <= 0:
        raise HypothesisError("phi_min > 0", f"phi = {params.phi}")

    lam = lambda_constant(params, convention)
    if lam <= 0:
        raise HypothesisError("lambda > 0", f"lambda = {lam:.6e}")

    l_psi = float(connectivity_constant(params.g_psi, convention))
    l_phi = float(connectivity_constant(params.g_phi, convention))
    c_b = max_degree(params.g_b)

    controle = l_phi * m_ctrl * phi_min
    gamma = controle / (k_acop * psi_max)
    limite_taxa = (2 * controle + n * (k_acop * psi_max) ** 2) / (4 * n * controle * lam)
    limite_sanduiche = 1.0 / math.sqrt(2 * n * controle)
    beta_min = max(limite_taxa, limite_sanduiche)

    beta = beta_override if beta_override is not None else beta_min * (1.0 + margin)
    if beta <= 0:
        raise HypothesisError("beta > 0", f"beta = {beta}")
    alpha = beta * m_ctrl / 2.0

    c0 = min(4 * alpha * beta * n * phi_min * l_phi - 1.0, beta ** 2) / (2 * beta)
    c1 = max(2 * n * phi_max * alpha + 0.5, beta + 0.5)
    taxa = 2 * beta * n * lam - (1.0 + n * (k_acop * psi_max) ** 2 / (2 * controle))
    c2 = min(taxa, n * controle / 2.0)

    if c0 <= 0:
        raise HypothesisError("alpha beta > 1/(4 N phi_min L_phi)", f"beta = {beta:.6e}, c0 = {c0:.3e}")
    if taxa <= 0:
        raise HypothesisError("beta acima do limite de dissipação", f"beta = {beta:.6e}, c2 = {taxa:.3e}")

    threshold = coupling_threshold(params, convention)
    constantes = AnalysisConstants(
        lam=lam, k_threshold=threshold, gamma=gamma, beta_min=beta_min, beta=beta,
        alpha=alpha, c0=c0, c1=c1, c2=c2, p=c1 / c0, q=c2 / c1,
        l_psi=l_psi, l_phi=l_phi, c_b=c_b, convention=convention,
    )
    logger.debug(f"Constantes de análise: {constantes}")
    return constantes


def hypotheses_report(params: ModelParams, initial_ensemble: Sequence[SwarmState],
                      convention: str = DEFAULT_CONVENCAO) -> Dict[str, dict]:
    """
    Avalia todas as hipóteses dos dois teoremas

    Returns:
        Dicionário nome -> {'passed': bool, ...detalhes}; a chave 'all_passed'
        resume o resultado
    """
    relatorio: Dict[str, dict] = {}

    for papel, g in (('G_psi', params.g_psi), ('G_phi', params.g_phi), ('G_B', params.g_b)):
        resultado = validate(g)
        relatorio[f'{papel}_symmetric'] = {'passed': resultado['symmetric']}
        relatorio[f'{papel}_connected'] = {'passed': resultado['connected']}

    relatorio['psi_min_positive'] = {'passed': params.psi.inf > 0, 'value': params.psi.inf}
    relatorio['K_positive'] = {'passed': params.coupling > 0, 'value': params.coupling}
    relatorio['M_positive'] = {'passed': params.control_strength > 0, 'value': params.control_strength}

    if params.psi.inf > 0:
        limiar = coupling_threshold(params, convention)
        relatorio['coupling_condition'] = {
            'passed': params.coupling > limiar, 'value': params.coupling, 'threshold': limiar,
        }
        if params.shares_noise_graph:
            limiar_mesmo_grafo = same_graph_threshold(params)
            relatorio['coupling_condition_same_graph'] = {
                'passed': params.coupling > limiar_mesmo_grafo, 'value': params.coupling,
                'threshold': limiar_mesmo_grafo,
            }

    lam = lambda_constant(params, convention)
    relatorio['lambda_positive'] = {'passed': lam > 0, 'value': lam}
    relatorio['phi_min_positive'] = {'passed': params.phi.inf > 0, 'value': params.phi.inf}

    mesmo_grafo = relatorio.get('coupling_condition_same_graph')
    if mesmo_grafo is not None and mesmo_grafo['passed']:
        # G_psi = G_B: o limiar relaxado substitui a condição geral e lambda > 0
        for nome in ('coupling_condition', 'lambda_positive'):
            if not relatorio[nome]['passed']:
                relatorio[nome].update(passed=True, general_passed=False,
                                       superseded_by='coupling_condition_same_graph')

    inicial = initial_condition_check(params, initial_ensemble)
    relatorio['initial_condition'] = {'passed': inicial.status != 'violated', **inicial.to_dict()}

    relatorio['all_passed'] = {'passed': all(item['passed'] for item in relatorio.values())}
    return relatorio


def failed_hypotheses(relatorio: Dict[str, dict]) -> List[str]:
    return [nome for nome, item in relatorio.items() if nome != 'all_passed' and not item['passed']]
