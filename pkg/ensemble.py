"""
Monte Carlo sobre realizações e diagnósticos em esperança.

Para cada instante de amostragem calcula média e erro padrão de:
energia cinética E||v||^2, funcional H, funcional de Lyapunov J, potencial
sum_{E_phi} Phi(|xb^ij|^2), termo cruzado, erro de padrão
E||x_t - v0_ave t - z||^2, integral da energia cinética e os dois lados do
balanço de energia. Também max_{i,j} E|v^i - v^j|^2 e max_{i,j} E|x^i - x^j|^2.

As verificações (flocking, sanduíche c0 H <= J <= c1 H, balanço, monotonia
de J, decaimento exponencial de H) usam folga de 3 erros padrão.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate as sp_integrate
from scipy import optimize

from config import (
    COLUNAS_COMPARACAO_ENERGIA,
    COLUNAS_ENERGIA,
    DEFAULT_CAIXA_POSICAO,
    DEFAULT_CAIXA_VELOCIDADE,
    DEFAULT_CONVENCAO,
    DEFAULT_MARGEM_BETA,
    DEFAULT_REALIZACOES,
    DEFAULT_SEED,
    DEFAULT_T_FINAL,
    FAMILIAS_GRAFO,
    FOLGA_SE,
    TOLERANCIA_DETERMINISTICA,
    TOLERANCIA_GRADE,
)
from graph import build_family, connectivity_constant
from integrator import BlowUpError, StepperConfig, integrate, make_rng, snap_to_grid
from model import (
    AnalysisConstants,
    HypothesisError,
    ModelParams,
    SwarmState,
    analysis_constants,
    failed_hypotheses,
    hypotheses_report,
    initial_condition_rhs,
    lambda_constant,
    phi_potential,
)

logger = logging.getLogger(__name__)

# Realizações por lote; fixo para que a ordem das somas não dependa do número de processos
_TAMANHO_LOTE = 10

# Grandezas escalares guardadas por realização
_GRANDEZAS_DIRETAS = ('kinetic', 'H', 'J', 'cross', 'phi_potential', 'pattern_error')
GRANDEZAS = _GRANDEZAS_DIRETAS + ('energy', 'kinetic_integral', 'budget_lhs', 'budget_rhs')


class EnsembleError(RuntimeError):
    """Configuração de ensemble inválida ou série incompatível"""


class PartialEnsembleError(EnsembleError):
    """Alguma realização explodiu; carrega a série parcial e as falhas"""

    def __init__(self, failures: List[dict], series: Optional["EnsembleSeries"]):
        indices = [f['realization'] for f in failures]
        super().__init__(f"{len(failures)} realização(ões) falharam: {indices}")
        self.failures = failures
        self.series = series


@dataclass(frozen=True)
class EnsembleConfig:
    """Número de realizações, amostrador inicial, semente e instantes de amostragem"""

    n_realizations: int = DEFAULT_REALIZACOES
    sample_times: Tuple[float, ...] = (0.0, DEFAULT_T_FINAL)
    seed: int = DEFAULT_SEED
    position_box: float = DEFAULT_CAIXA_POSICAO
    velocity_box: float = DEFAULT_CAIXA_VELOCIDADE
    shift_positions: bool = True
    shift_velocities: bool = True
    same_initial: bool = True
    initial_states: Optional[Tuple[SwarmState, ...]] = field(default=None, compare=False)
    snapshot_times: Tuple[float, ...] = ()
    snapshot_all: bool = False
    n_workers: int = 1

    def __post_init__(self):
        if self.n_realizations < 1:
            raise EnsembleError(f"R deve ser >= 1 (recebido {self.n_realizations})")
        tempos = tuple(float(t) for t in self.sample_times)
        if not tempos:
            raise EnsembleError("Nenhum instante de amostragem")
        if any(b <= a for a, b in zip(tempos, tempos[1:])):
            raise EnsembleError("Instantes de amostragem devem ser estritamente crescentes")
        object.__setattr__(self, 'sample_times', tempos)
        object.__setattr__(self, 'snapshot_times', tuple(sorted(float(t) for t in self.snapshot_times)))
        if self.position_box < 0 or self.velocity_box < 0:
            raise EnsembleError(
                f"Caixas devem ser >= 0 (posição {self.position_box}, velocidade {self.velocity_box})"
            )
        if self.initial_states is not None:
            estados = tuple(self.initial_states)
            if len(estados) not in (1, self.n_realizations):
                raise EnsembleError(
                    f"Lista explícita com {len(estados)} estados; esperado 1 ou R = {self.n_realizations}"
                )
            if len({e.t for e in estados}) != 1:
                raise EnsembleError("Estados iniciais explícitos com instantes diferentes")
            object.__setattr__(self, 'initial_states', estados)
        if self.n_workers < 1:
            raise EnsembleError(f"n_workers deve ser >= 1 (recebido {self.n_workers})")


@dataclass
class EnsembleSeries:
    """
    Séries de médias e erros padrão por instante, mais os valores por realização

    frame: DataFrame com 't', cada grandeza e '<grandeza>_se', c0H, c1H,
        maxpair_v e maxpair_x
    raw: grandeza -> matriz (R, S) de valores por realização
    """

    frame: pd.DataFrame
    raw: Dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)
    snapshots: Dict[int, List[SwarmState]] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.frame['t'].to_numpy()

    @property
    def n_realizations(self) -> int:
        return self.raw['kinetic'].shape[0]

    def mean(self, nome: str) -> np.ndarray:
        return self.frame[nome].to_numpy()

    def se(self, nome: str) -> np.ndarray:
        return self.frame[f'{nome}_se'].to_numpy()

    def energies_frame(self) -> pd.DataFrame:
        return self.frame[COLUNAS_ENERGIA]


# Amostragem inicial

def sample_initial(cfg: EnsembleConfig, params: ModelParams, rng: np.random.Generator,
                   t0: float = 0.0) -> SwarmState:
    """
    Sorteia um estado inicial nas caixas e aplica os deslocamentos rígidos

    Posições uniformes em [-a, a]^d e velocidades em [-b, b]^d; depois
    x_ave = z_ave e v_ave = 0 exatamente (quando os deslocamentos estão ligados).
    """
    forma = (params.n_agents, params.dim)
    x = rng.uniform(-cfg.position_box, cfg.position_box, size=forma)
    v = rng.uniform(-cfg.velocity_box, cfg.velocity_box, size=forma)
    if cfg.shift_positions:
        x = x - x.mean(axis=0) + params.targets.mean(axis=0)
    if cfg.shift_velocities:
        v = v - v.mean(axis=0)
    return SwarmState(x, v, t0)


# Diagnósticos por estado

def _diagnosticos(params: ModelParams, estado: SwarmState, inicial: SwarmState,
                  alpha: Optional[float], beta: Optional[float]) -> Dict[str, float]:
    z = params.targets
    desvio = estado.x - z
    desvio_c = desvio - desvio.mean(axis=0)
    v = estado.v
    v_c = v - v.mean(axis=0)

    cinetica = float(np.sum(v * v))
    potencial = phi_potential(params, estado.x)
    cruzado = float(np.sum(desvio_c * v))
    deriva = inicial.v.mean(axis=0) * (estado.t - inicial.t)

    if alpha is None:
        lyapunov = math.nan
    else:
        lyapunov = alpha * potencial + cruzado + beta * cinetica

    return {
        'kinetic': cinetica,
        'H': float(np.sum(desvio_c ** 2) + np.sum(v_c ** 2)),
        'J': lyapunov,
        'cross': cruzado,
        'phi_potential': potencial,
        'pattern_error': float(np.sum((estado.x - deriva - z) ** 2)),
    }


def _pares(y: np.ndarray) -> np.ndarray:
    """Matriz |y^i - y^j|^2"""
    d = y[None, :, :] - y[:, None, :]
    return np.einsum('ijk,ijk->ij', d, d)


def _executar_lote(tarefa: dict) -> dict:
    """Integra um lote de realizações em sequência e acumula os diagnósticos"""
    params = tarefa['params']
    n_amostras = len(tarefa['posicoes_amostra'])
    n = params.n_agents

    escalares = {nome: [] for nome in _GRANDEZAS_DIRETAS}
    pares_v = np.zeros((n_amostras, n, n))
    pares_x = np.zeros((n_amostras, n, n))
    concluidas, falhas, snapshots = [], [], {}

    for indice, inicial, rng in tarefa['realizacoes']:
        try:
            estados = integrate(params, inicial, tarefa['stepper'], tarefa['t_end'],
                                tarefa['tempos'], rng=rng)
        except BlowUpError as e:
            logger.warning(f"⚠️ Realização {indice} explodiu em t = {e.time:.4f}")
            falhas.append({'realization': indice, 'time': e.time, 'message': str(e)})
            continue

        amostras = [estados[k] for k in tarefa['posicoes_amostra']]
        diagnosticos = [_diagnosticos(params, e, inicial, tarefa['alpha'], tarefa['beta'])
                        for e in amostras]
        for nome in _GRANDEZAS_DIRETAS:
            escalares[nome].append([d[nome] for d in diagnosticos])
        for s, estado in enumerate(amostras):
            pares_v[s] += _pares(estado.v)
            pares_x[s] += _pares(estado.x)

        concluidas.append(indice)
        if indice == 0 or tarefa['snapshot_all']:
            snapshots[indice] = [estados[k] for k in tarefa['posicoes_snapshot']]

    return {
        'concluidas': concluidas,
        'escalares': {nome: np.array(valores, dtype=float).reshape(-1, n_amostras)
                      for nome, valores in escalares.items()},
        'pares_v': pares_v,
        'pares_x': pares_x,
        'falhas': falhas,
        'snapshots': snapshots,
    }


def _erro_padrao(amostras: np.ndarray) -> np.ndarray:
    """Desvio padrão amostral / sqrt(R) ao longo do eixo das realizações"""
    r = amostras.shape[0]
    if r < 2:
        return np.zeros(amostras.shape[1:])
    return amostras.std(axis=0, ddof=1) / math.sqrt(r)


# Nível eta e limite de posições

def eta_level(params: ModelParams, rhs: float) -> Optional[float]:
    """
    Raiz de Phi(eta) = rhs, ou None quando não existe

    Phi é crescente; o intervalo é dobrado até conter a raiz.
    """
    if not math.isfinite(rhs):
        return None
    if rhs <= 0:
        return 0.0
    phi = params.phi
    if not phi.tail_integral_diverges() and phi.integral_to_infinity() <= rhs:
        return None

    superior = 1.0
    while phi.antiderivative(superior) < rhs:
        superior *= 2.0
        if superior > 1e300:
            return None
    return optimize.brentq(lambda r: phi.antiderivative(r) - rhs, 0.0, superior, xtol=1e-12, rtol=1e-12)


def position_bound(params: ModelParams, eta: float, convention: str = DEFAULT_CONVENCAO) -> float:
    """2 |E_phi| eta / L_phi + 2 sum_{i,j} |z^i - z^j|^2"""
    l_phi = float(connectivity_constant(params.g_phi, convention))
    dispersao = float(_pares(params.targets).sum())
    return 2.0 * params.g_phi.n_edges * eta / l_phi + 2.0 * dispersao


# Execução

def _estados_iniciais(params: ModelParams, cfg: EnsembleConfig,
                      filhos: Sequence[np.random.SeedSequence]):
    """Estados iniciais por realização e os geradores já posicionados"""
    geradores = [make_rng(f) for f in filhos[1:]]
    r = cfg.n_realizations

    if cfg.initial_states is not None:
        iniciais = [cfg.initial_states[i % len(cfg.initial_states)] for i in range(r)]
        distintos = list(cfg.initial_states)
    elif cfg.same_initial:
        comum = sample_initial(cfg, params, make_rng(filhos[0]))
        iniciais = [comum] * r
        distintos = [comum]
    else:
        iniciais = [sample_initial(cfg, params, g) for g in geradores]
        distintos = iniciais

    for estado in distintos:
        if estado.x.shape != (params.n_agents, params.dim):
            raise EnsembleError(
                f"Estado inicial com forma {estado.x.shape}, esperado {(params.n_agents, params.dim)}"
            )
    return iniciais, distintos, geradores


def initial_ensemble(params: ModelParams, cfg: EnsembleConfig) -> List[SwarmState]:
    """
    Estados iniciais distintos que run usaria com esta configuração

    Um único estado no modo de dado inicial comum.
    """
    filhos = np.random.SeedSequence(int(cfg.seed)).spawn(cfg.n_realizations + 1)
    return _estados_iniciais(params, cfg, filhos)[1]


def run(params: ModelParams, cfg: EnsembleConfig, stepper_cfg: StepperConfig,
        analysis: Optional[AnalysisConstants] = None,
        convention: str = DEFAULT_CONVENCAO) -> EnsembleSeries:
    """
    Executa R realizações independentes e monta a série de diagnósticos

    A realização r usa o subfluxo r + 1 de SeedSequence(cfg.seed); o
    subfluxo 0 gera o estado inicial comum. As hipóteses dos teoremas são
    avaliadas antes; falhas geram aviso mas não interrompem a execução.

    Args:
        params: Parâmetros do modelo
        cfg: Configuração do ensemble
        stepper_cfg: Passo e esquema (a semente do ensemble prevalece)
        analysis: Constantes de análise (None desliga J, c0H e c1H)
        convention: Convenção do complemento para lambda e o limite de posições

    Returns:
        Série com médias, erros padrão e valores por realização

    Raises:
        PartialEnsembleError: se alguma realização explodir
    """
    if analysis is not None:
        convention = analysis.convention
    r = cfg.n_realizations
    filhos = np.random.SeedSequence(int(cfg.seed)).spawn(r + 1)
    iniciais, distintos, geradores = _estados_iniciais(params, cfg, filhos)
    t0 = iniciais[0].t

    logger.info(f"🚀 Ensemble: R = {r}, N = {params.n_agents}, dt = {stepper_cfg.dt}, "
                f"esquema = {stepper_cfg.scheme}, semente = {cfg.seed}")

    relatorio = hypotheses_report(params, distintos, convention)
    falhas_hipotese = failed_hypotheses(relatorio)
    if falhas_hipotese:
        logger.warning(f"⚠️ Hipóteses não satisfeitas (execução exploratória): {falhas_hipotese}")

    # Grade de amostragem sempre contém t0
    if cfg.sample_times[0] < t0 - TOLERANCIA_GRADE or (cfg.snapshot_times and cfg.snapshot_times[0] < t0):
        raise EnsembleError(f"Instantes anteriores ao instante inicial {t0}")
    idx_amostra = np.union1d([0], snap_to_grid(cfg.sample_times, t0, stepper_cfg.dt))
    idx_snapshot = (snap_to_grid(cfg.snapshot_times, t0, stepper_cfg.dt)
                    if cfg.snapshot_times else np.array([], dtype=np.int64))
    idx_todos = np.union1d(idx_amostra, idx_snapshot)
    tempos_todos = t0 + idx_todos * stepper_cfg.dt
    tempos_amostra = t0 + idx_amostra * stepper_cfg.dt

    alpha = analysis.alpha if analysis is not None else None
    beta = analysis.beta if analysis is not None else None
    base = {
        'params': params,
        'stepper': stepper_cfg,
        't_end': float(tempos_todos[-1]),
        'tempos': tempos_todos,
        'posicoes_amostra': np.searchsorted(idx_todos, idx_amostra),
        'posicoes_snapshot': np.searchsorted(idx_todos, np.unique(idx_snapshot)),
        'alpha': alpha,
        'beta': beta,
        'snapshot_all': cfg.snapshot_all,
    }
    tarefas = []
    for inicio in range(0, r, _TAMANHO_LOTE):
        indices = range(inicio, min(inicio + _TAMANHO_LOTE, r))
        tarefas.append({**base, 'realizacoes': [(i, iniciais[i], geradores[i]) for i in indices]})

    if cfg.n_workers > 1 and len(tarefas) > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_workers) as executor:
            lotes = list(executor.map(_executar_lote, tarefas))
    else:
        lotes = [_executar_lote(t) for t in tarefas]

    falhas = []
    for lote in lotes:
        for falha in lote['falhas']:
            falha['seed'] = int(cfg.seed)
            falha['spawn_key'] = list(filhos[falha['realization'] + 1].spawn_key)
            falhas.append(falha)

    concluidas = [i for lote in lotes for i in lote['concluidas']]
    if not concluidas:
        raise PartialEnsembleError(falhas, None)

    n_amostras = len(idx_amostra)
    n = params.n_agents
    soma_v = np.zeros((n_amostras, n, n))
    soma_x = np.zeros((n_amostras, n, n))
    for lote in lotes:
        soma_v = soma_v + lote['pares_v']
        soma_x = soma_x + lote['pares_x']

    raw = {nome: np.concatenate([lote['escalares'][nome] for lote in lotes])
           for nome in _GRANDEZAS_DIRETAS}

    lam = lambda_constant(params, convention)
    raw['energy'] = raw['kinetic'] + 0.5 * params.control_strength * raw['phi_potential']
    if n_amostras > 1:
        raw['kinetic_integral'] = sp_integrate.cumulative_trapezoid(
            raw['kinetic'], tempos_amostra, axis=1, initial=0.0
        )
    else:
        raw['kinetic_integral'] = np.zeros_like(raw['kinetic'])
    raw['budget_lhs'] = raw['energy'] + 2.0 * n * lam * raw['kinetic_integral']
    raw['budget_rhs'] = np.repeat(raw['energy'][:, :1], n_amostras, axis=1)

    dados = {'t': tempos_amostra}
    for nome in GRANDEZAS:
        dados[nome] = raw[nome].mean(axis=0)
        dados[f'{nome}_se'] = _erro_padrao(raw[nome])
    dados['c0H'] = analysis.c0 * dados['H'] if analysis is not None else np.full(n_amostras, np.nan)
    dados['c1H'] = analysis.c1 * dados['H'] if analysis is not None else np.full(n_amostras, np.nan)
    dados['maxpair_v'] = (soma_v / len(concluidas)).max(axis=(1, 2))
    dados['maxpair_x'] = (soma_x / len(concluidas)).max(axis=(1, 2))

    frame = pd.DataFrame(dados)
    extras = [c for c in frame.columns if c not in COLUNAS_ENERGIA]
    frame = frame[COLUNAS_ENERGIA + extras]

    rhs, rhs_se = initial_condition_rhs(params, distintos)
    eta = eta_level(params, rhs)
    metadata = {
        'n_realizations': len(concluidas),
        'n_requested': r,
        'seed': int(cfg.seed),
        'same_initial': cfg.same_initial and cfg.initial_states is None,
        'mean_shift': {'positions': cfg.shift_positions, 'velocities': cfg.shift_velocities},
        'convention': convention,
        'lambda': lam,
        'n_agents': n,
        'control_strength': params.control_strength,
        'alpha': alpha,
        'beta': beta,
        'initial_rhs': rhs,
        'initial_rhs_se': rhs_se,
        'eta': eta,
        'position_bound': position_bound(params, eta, convention) if eta is not None else None,
        'z_ave': params.targets.mean(axis=0).tolist(),
        'hypotheses': relatorio,
        'failures': falhas,
    }
    serie = EnsembleSeries(frame=frame, raw=raw, metadata=metadata,
                           snapshots={i: s for lote in lotes for i, s in lote['snapshots'].items()})

    if falhas:
        logger.error(f"❌ {len(falhas)} de {r} realizações falharam")
        raise PartialEnsembleError(falhas, serie)

    logger.info(f"✅ Ensemble concluído: {len(concluidas)} realizações, {n_amostras} amostras")
    return serie


# Verificações

def _folga(se: np.ndarray, escala: np.ndarray) -> np.ndarray:
    return FOLGA_SE * se + TOLERANCIA_DETERMINISTICA * np.abs(escala)


def _lyapunov(series: EnsembleSeries, analysis: AnalysisConstants) -> np.ndarray:
    """J por realização recalculado com o alpha e beta fornecidos"""
    raw = series.raw
    return analysis.alpha * raw['phi_potential'] + raw['cross'] + analysis.beta * raw['kinetic']


def flocking_verdict(series: EnsembleSeries, tol_v: float, horizon: Optional[float] = None,
                     bound: Optional[float] = None) -> dict:
    """
    Veredito de flocking estocástico assintótico

    Args:
        series: Série do ensemble
        tol_v: Tolerância absoluta para max_{i,j} E|v^i - v^j|^2 no instante final
        horizon: Último instante considerado (padrão: fim da série)
        bound: Limite explícito para max_{i,j} E|x^i - x^j|^2 (padrão: o da série)

    Returns:
        {'flocking', 'bounded', 'mode', 'bound'}; sem limite calculável o
        critério é a ausência de tendência (final <= 2 x mediana)
    """
    tempos = series.times
    if horizon is None:
        horizon = tempos[-1]
    if horizon > tempos[-1] + TOLERANCIA_GRADE * max(1.0, abs(tempos[-1])):
        raise EnsembleError(f"Horizonte {horizon} além do fim da série ({tempos[-1]})")
    mascara = tempos <= horizon + TOLERANCIA_GRADE * max(1.0, abs(horizon))

    pares_v = series.mean('maxpair_v')[mascara]
    pares_x = series.mean('maxpair_x')[mascara]

    if bound is None:
        bound = series.metadata.get('position_bound')
    if bound is not None and math.isfinite(bound):
        limitado = bool(pares_x.max() <= bound)
        modo = 'bound'
    else:
        limitado = bool(pares_x[-1] <= 2.0 * np.median(pares_x))
        modo = 'trend'

    return {'flocking': bool(pares_v[-1] <= tol_v), 'bounded': limitado, 'mode': modo, 'bound': bound}


def sandwich_check(series: EnsembleSeries, analysis: AnalysisConstants) -> np.ndarray:
    """
    c0 H - 3 SE <= J <= c1 H + 3 SE em cada instante

    O SE é o da diferença por realização, que combina os dois estimadores.
    """
    lyapunov = _lyapunov(series, analysis)
    h = series.raw['H']
    inferior = lyapunov - analysis.c0 * h
    superior = analysis.c1 * h - lyapunov
    escala = np.abs(lyapunov.mean(axis=0)) + analysis.c1 * h.mean(axis=0)
    ok_inf = inferior.mean(axis=0) >= -_folga(_erro_padrao(inferior), escala)
    ok_sup = superior.mean(axis=0) >= -_folga(_erro_padrao(superior), escala)
    return ok_inf & ok_sup


def budget_check(series: EnsembleSeries, params: ModelParams,
                 convention: str = DEFAULT_CONVENCAO) -> np.ndarray:
    """
    Balanço de energia: E[||v_t||^2 + (M/2) sum Phi] + 2 N lambda int E||v||^2 <= valor inicial

    Raises:
        HypothesisError: lambda < 0
    """
    lam = lambda_constant(params, convention)
    if lam < 0:
        raise HypothesisError("lambda >= 0", f"lambda = {lam:.6e}")
    raw = series.raw
    lhs = raw['energy'] + 2.0 * params.n_agents * lam * raw['kinetic_integral']
    diferenca = lhs - raw['energy'][:, :1]
    return diferenca.mean(axis=0) <= _folga(_erro_padrao(diferenca), raw['energy'][:, 0].mean())


def lyapunov_monotone_check(series: EnsembleSeries, analysis: AnalysisConstants) -> np.ndarray:
    """J(t_{k+1}) <= J(t_k) com folga; um booleano por par consecutivo"""
    lyapunov = _lyapunov(series, analysis)
    diferenca = lyapunov[:, 1:] - lyapunov[:, :-1]
    return diferenca.mean(axis=0) <= _folga(_erro_padrao(diferenca), lyapunov[:, :-1].mean(axis=0))


def decay_check(series: EnsembleSeries, analysis: AnalysisConstants) -> np.ndarray:
    """H(t) <= p H(0) exp(-q t) com folga"""
    h = series.raw['H']
    tempos = series.times
    limite = analysis.p * np.exp(-analysis.q * (tempos - tempos[0]))[None, :] * h[:, :1]
    diferenca = h - limite
    return diferenca.mean(axis=0) <= _folga(_erro_padrao(diferenca), limite.mean(axis=0))


def kinetic_integral_check(series: EnsembleSeries, params: ModelParams,
                           convention: str = DEFAULT_CONVENCAO) -> np.ndarray:
    """
    int_0^t E||v||^2 <= E[energia inicial] / (2 N lambda) em cada instante

    Raises:
        HypothesisError: lambda <= 0
    """
    lam = lambda_constant(params, convention)
    if lam <= 0:
        raise HypothesisError("lambda > 0", f"lambda = {lam:.6e}")
    raw = series.raw
    limite = raw['energy'][:, :1] / (2.0 * params.n_agents * lam)
    diferenca = raw['kinetic_integral'] - limite
    return diferenca.mean(axis=0) <= _folga(_erro_padrao(diferenca), limite.mean())


def _razao(final: float, inicial: float) -> float:
    if inicial > 0:
        return final / inicial
    return 0.0 if final == 0 else math.inf


def decay_ratio(series: EnsembleSeries, nome: str) -> float:
    """Valor final / valor inicial da média de uma grandeza"""
    valores = series.mean(nome)
    return _razao(float(valores[-1]), float(valores[0]))


def pattern_check(series: EnsembleSeries, tol: float = 1e-2) -> dict:
    """E||x_t - v0_ave t - z||^2 final <= tol x valor inicial"""
    razao = decay_ratio(series, 'pattern_error')
    return {'passed': bool(razao <= tol), 'ratio': razao, 'tol': tol}


def _resumo_booleano(valores: np.ndarray) -> dict:
    return {'passed': bool(np.all(valores)), 'n_failed': int(np.sum(~valores)), 'n_checked': int(valores.size)}


def evaluate_checks(series: EnsembleSeries, params: ModelParams,
                    analysis: Optional[AnalysisConstants],
                    convention: str = DEFAULT_CONVENCAO,
                    flocking_tol: float = 1e-2, pattern_tol: float = 1e-2) -> dict:
    """
    Executa todas as verificações sobre uma série

    Returns:
        Dicionário nome -> resultado; verificações que dependem de hipóteses
        não satisfeitas aparecem com 'passed': None e o motivo em 'skipped'
    """
    resultados = {}
    tol_v = flocking_tol * float(series.mean('maxpair_v')[0])
    resultados['flocking'] = flocking_verdict(series, tol_v)
    razao = decay_ratio(series, 'kinetic')
    resultados['kinetic_decay'] = {'passed': bool(razao <= flocking_tol), 'ratio': razao, 'tol': flocking_tol}
    resultados['pattern'] = pattern_check(series, pattern_tol)

    for nome, funcao in (('budget', budget_check), ('kinetic_integral', kinetic_integral_check)):
        try:
            resultados[nome] = _resumo_booleano(funcao(series, params, convention))
        except HypothesisError as e:
            resultados[nome] = {'passed': None, 'skipped': str(e)}

    if analysis is None:
        for nome in ('sandwich', 'lyapunov_monotone', 'decay'):
            resultados[nome] = {'passed': None, 'skipped': 'constantes de análise indisponíveis'}
    else:
        resultados['sandwich'] = _resumo_booleano(sandwich_check(series, analysis))
        resultados['lyapunov_monotone'] = _resumo_booleano(lyapunov_monotone_check(series, analysis))
        resultados['decay'] = _resumo_booleano(decay_check(series, analysis))
    return resultados


# Comparação entre redes de controle

@dataclass
class NetworkComparison:
    """Resultado da varredura de G_phi: tabela-resumo e séries por família"""

    table: pd.DataFrame
    series: Dict[str, EnsembleSeries]

    @property
    def families(self) -> List[str]:
        return list(self.series)

    def energies_long(self) -> pd.DataFrame:
        """Formato longo: uma linha por (família, instante) com H, J, c0H, c1H e erros padrão"""
        partes = []
        for familia, serie in self.series.items():
            parte = serie.frame[COLUNAS_COMPARACAO_ENERGIA[1:]].copy()
            parte.insert(0, 'family', familia)
            partes.append(parte)
        return pd.concat(partes, ignore_index=True)


def compare_networks(params: ModelParams, cfg: EnsembleConfig, stepper_cfg: StepperConfig,
                     convention: str = DEFAULT_CONVENCAO, margin: float = DEFAULT_MARGEM_BETA,
                     families: Sequence[str] = tuple(FAMILIAS_GRAFO)) -> NetworkComparison:
    """
    Varre G_phi pelas famílias mantendo G_psi e G_B fixos

    Returns:
        NetworkComparison com a tabela (uma linha por família: beta_min, H e J
        finais e razões de decaimento) e a série completa de cada família
    """
    linhas = []
    series = {}
    for familia in families:
        logger.info(f"📊 Comparação: G_phi = {familia}")
        variante = replace(params, g_phi=build_family(familia, params.n_agents))
        try:
            constantes = analysis_constants(variante, convention, margin)
        except HypothesisError as e:
            logger.warning(f"⚠️ {familia}: constantes indisponíveis ({e})")
            constantes = None

        serie = run(variante, cfg, stepper_cfg, constantes, convention)
        linha = {
            'family': familia,
            'beta_min': constantes.beta_min if constantes else math.nan,
            'final_H': float(serie.mean('H')[-1]),
            'final_J': float(serie.mean('J')[-1]),
            'H_ratio': decay_ratio(serie, 'H'),
            'J_ratio': decay_ratio(serie, 'J') if constantes else math.nan,
            'kinetic_ratio': decay_ratio(serie, 'kinetic'),
        }
        linhas.append(linha)
        series[familia] = serie
    return NetworkComparison(table=pd.DataFrame(linhas), series=series)
