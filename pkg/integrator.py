"""
Integração de uma realização do sistema estocástico.

Esquema de Euler-Maruyama melhorado (preditor-corretor de dois estágios):
a cada passo sorteia-se UM incremento escalar dW ~ N(0, dt) e um sinal
S = ±1 equiprovável, compartilhados por todos os agentes e componentes.

    k1 = f(X) dt + g(X) (dW - S sqrt(dt))
    k2 = f(X + k1) dt + g(X + k1) (dW + S sqrt(dt))
    X+ = X + (k1 + k2) / 2

Com g = 0 o esquema coincide com o método de Heun.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from config import (
    DEFAULT_DT,
    DEFAULT_ESQUEMA,
    DEFAULT_SEED,
    ESQUEMA_IMPROVED_EM,
    ESQUEMAS,
    TOLERANCIA_GRADE,
)
from model import ModelParams, SwarmState, diffusion, drift

logger = logging.getLogger(__name__)

_MAX_SEED = 2 ** 64


class IntegrationError(RuntimeError):
    """Falha na integração de uma trajetória"""


class BlowUpError(IntegrationError):
    """Estado não finito após um passo"""

    def __init__(self, time: float, detalhe: str = ""):
        super().__init__(f"Explosão numérica em t = {time:.6f}" + (f": {detalhe}" if detalhe else ""))
        self.time = time


@dataclass(frozen=True)
class StepperConfig:
    """Passo de tempo, semente e esquema de uma integração"""

    dt: float = DEFAULT_DT
    seed: int = DEFAULT_SEED
    scheme: str = DEFAULT_ESQUEMA

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise IntegrationError(f"dt deve ser positivo e finito (recebido {self.dt})")
        if not (0 <= int(self.seed) < _MAX_SEED):
            raise IntegrationError(f"Semente fora de [0, 2^64): {self.seed}")
        if self.scheme not in ESQUEMAS:
            raise IntegrationError(f"Esquema desconhecido '{self.scheme}'. Disponíveis: {ESQUEMAS}")


# Geradores

def make_rng(seed) -> np.random.Generator:
    """
    Gerador Philox (contador) a partir de uma semente ou SeedSequence
    """
    sequencia = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(sequencia))


def spawn_rngs(seed: int, n: int) -> List[np.random.Generator]:
    """
    n subfluxos independentes derivados de (seed, índice)
    """
    return [make_rng(filho) for filho in np.random.SeedSequence(int(seed)).spawn(n)]


def draw_increment(rng: np.random.Generator, dt: float):
    """
    Sorteia o par (dW, S) de um passo

    Os dois valores são sempre consumidos, qualquer que seja o esquema, para
    que a mesma semente gere o mesmo caminho browniano nos dois esquemas.
    """
    dw = rng.normal(0.0, math.sqrt(dt))
    sinal = 1.0 if rng.random() < 0.5 else -1.0
    return dw, sinal


# Núcleo genérico

def improved_em_step(f: Callable, g: Callable, y: np.ndarray, dt: float, dw: float, s: float) -> np.ndarray:
    """
    Um passo de Euler-Maruyama melhorado para dY = f(Y) dt + g(Y) dB

    Args:
        f: Deriva, mesma forma de y
        g: Coeficiente de difusão, mesma forma de y (multiplica o dW escalar)
        y: Estado atual
        dt: Passo de tempo
        dw: Incremento browniano escalar
        s: Sinal ±1

    Returns:
        Estado no instante seguinte
    """
    raiz = math.sqrt(dt)
    k1 = f(y) * dt + g(y) * (dw - s * raiz)
    preditor = y + k1
    k2 = f(preditor) * dt + g(preditor) * (dw + s * raiz)
    return y + 0.5 * (k1 + k2)


def euler_maruyama_step(f: Callable, g: Callable, y: np.ndarray, dt: float, dw: float) -> np.ndarray:
    return y + f(y) * dt + g(y) * dw


# Sistema do enxame

def _sistema(params: ModelParams, t: float):
    """Deriva e difusão empacotadas no vetor Y = (x, v) de forma (2, N, d)"""

    def f(y):
        dx, dv = drift(params, SwarmState(y[0], y[1], t))
        return np.stack((dx, dv))

    def g(y):
        coef = diffusion(params, SwarmState(y[0], y[1], t))
        return np.stack((np.zeros_like(coef), coef))

    return f, g


def step(params: ModelParams, state: SwarmState, cfg: StepperConfig,
         rng: np.random.Generator) -> SwarmState:
    """
    Avança uma realização por dt

    Raises:
        BlowUpError: se alguma coordenada deixar de ser finita
    """
    if not state.is_finite:
        raise BlowUpError(state.t, "estado de entrada não finito")

    dw, sinal = draw_increment(rng, cfg.dt)
    f, g = _sistema(params, state.t)
    y = np.stack((state.x, state.v))

    if cfg.scheme == ESQUEMA_IMPROVED_EM:
        novo = improved_em_step(f, g, y, cfg.dt, dw, sinal)
    else:
        novo = euler_maruyama_step(f, g, y, cfg.dt, dw)

    t_novo = state.t + cfg.dt
    if not np.all(np.isfinite(novo)):
        raise BlowUpError(t_novo)
    return SwarmState(novo[0], novo[1], t_novo)


def snap_to_grid(times: Sequence[float], t0: float, dt: float) -> np.ndarray:
    """
    Converte instantes em índices da grade t0 + k dt

    Instantes fora da grade são arredondados para o ponto mais próximo com
    um aviso.
    """
    tempos = np.asarray(times, dtype=float)
    indices = np.rint((tempos - t0) / dt).astype(np.int64)
    desvio = np.abs(t0 + indices * dt - tempos)
    fora = desvio > TOLERANCIA_GRADE * np.maximum(1.0, np.abs(tempos))
    if np.any(fora):
        logger.warning(
            f"⚠️ {int(fora.sum())} instante(s) fora da grade dt = {dt:g}; "
            f"arredondados (ex.: {tempos[fora][0]} -> {t0 + indices[fora][0] * dt})"
        )
    return indices


def integrate(params: ModelParams, initial: SwarmState, cfg: StepperConfig, t_end: float,
              sample_times: Optional[Sequence[float]] = None,
              rng: Optional[np.random.Generator] = None,
              observer: Optional[Callable[[SwarmState], None]] = None) -> List[SwarmState]:
    """
    Integra de initial.t até t_end e devolve os estados nos instantes pedidos

    Args:
        params: Parâmetros do modelo
        initial: Estado inicial
        cfg: Configuração do integrador
        t_end: Instante final
        sample_times: Instantes de amostragem (padrão: initial.t e t_end)
        rng: Gerador a usar (padrão: make_rng(cfg.seed))
        observer: Chamado com o estado após cada passo

    Returns:
        Lista de estados, um por instante distinto da grade, em ordem

    Raises:
        IntegrationError: instantes fora de [initial.t, t_end] ou fora de ordem
        BlowUpError: propagado de step
    """
    t0 = initial.t
    if t_end < t0:
        raise IntegrationError(f"t_end = {t_end} anterior ao instante inicial {t0}")
    if sample_times is None:
        sample_times = [t0, t_end]
    tempos = np.asarray(sample_times, dtype=float)
    if tempos.size == 0:
        raise IntegrationError("Nenhum instante de amostragem")
    if np.any(np.diff(tempos) < 0):
        raise IntegrationError("Instantes de amostragem fora de ordem")
    folga = TOLERANCIA_GRADE * max(1.0, abs(t_end))
    if tempos[0] < t0 - folga or tempos[-1] > t_end + folga:
        raise IntegrationError(f"Instantes de amostragem fora de [{t0}, {t_end}]")

    indices = np.unique(snap_to_grid(tempos, t0, cfg.dt))
    if rng is None:
        rng = make_rng(cfg.seed)

    amostras = []
    estado = initial
    k = 0
    for alvo in indices:
        while k < alvo:
            estado = step(params, estado, cfg, rng)
            k += 1
            estado = SwarmState(estado.x, estado.v, t0 + k * cfg.dt)
            if observer is not None:
                observer(estado)
        amostras.append(estado)
    return amostras
