"""
Funções de peso de comunicação psi e phi.

Três famílias fechadas:
- power_shift(a, b, c): r -> a (1 + r^2)^(-b) + c
- ckpp(beta):           r -> (1 + r)^(-beta)
- constant(c):          r -> c

Cada núcleo expõe ínfimo/supremo analíticos em [0, inf) e a primitiva
Phi(r) = int_0^r k(s) ds (forma fechada quando existe, quadratura adaptativa
caso contrário, e uma tabela cumulativa preguiçosa para avaliações em lote).
"""

import logging
import math
import re
import threading
from dataclasses import dataclass, field
from functools import partial
from typing import Tuple

import numpy as np
from scipy import integrate, special

from config import QUAD_EPSABS, QUAD_LIMITE

logger = logging.getLogger(__name__)

FORMAS = ('power_shift', 'ckpp', 'constant')
N_PARAMETROS = {'power_shift': 3, 'ckpp': 1, 'constant': 1}

# Nós de Gauss-Legendre para a tabela cumulativa
_GL_NOS, _GL_PESOS = np.polynomial.legendre.leggauss(10)
# Largura relativa das células: w_k = 0.25 (1 + r_k)
_FATOR_CELULA = 0.25


class KernelError(ValueError):
    """Núcleo mal especificado ou avaliado fora do domínio"""


class QuadratureError(KernelError):
    """Quadratura adaptativa sem convergência"""

    def __init__(self, mensagem: str, achieved_error: float):
        super().__init__(f"{mensagem} (erro estimado {achieved_error:.3e})")
        self.achieved_error = achieved_error


def _power_shift(a, b, c, r):
    return a * (1.0 + r * r) ** (-b) + c


def _integrar_gl(func, inicio: np.ndarray, fim: np.ndarray) -> np.ndarray:
    """Gauss-Legendre vetorizado em intervalos [inicio, fim]"""
    meio = 0.5 * (fim + inicio)
    raio = 0.5 * (fim - inicio)
    pontos = meio[..., None] + raio[..., None] * _GL_NOS
    return raio * (func(pontos) @ _GL_PESOS)


class _PrimitiveTable:
    """
    Tabela cumulativa de Phi numa grade geométrica que cresce sob demanda.

    Cada célula [r_k, r_k + 0.25 (1 + r_k)] é integrada por Gauss-Legendre;
    dentro da célula o resto é integrado pela mesma regra. A troca da grade
    é atômica (tupla imutável), leituras concorrentes não precisam de trava.
    """

    def __init__(self, integrand):
        self._integrand = integrand
        self._lock = threading.Lock()
        self._grade = (np.array([0.0]), np.array([0.0]))

    def __getstate__(self):
        return {'_integrand': self._integrand, '_grade': self._grade}

    def __setstate__(self, estado):
        self._integrand = estado['_integrand']
        self._grade = estado['_grade']
        self._lock = threading.Lock()

    def _estender(self, r_max: float):
        with self._lock:
            nos, valores = self._grade
            if nos[-1] >= r_max:
                return
            novos = []
            ultimo = nos[-1]
            alvo = max(r_max, 2.0 * ultimo)
            while ultimo < alvo:
                ultimo = ultimo + _FATOR_CELULA * (1.0 + ultimo)
                novos.append(ultimo)
            novos = np.array(novos)
            inicios = np.concatenate(([nos[-1]], novos[:-1]))
            celulas = _integrar_gl(self._integrand, inicios, novos)
            acumulado = valores[-1] + np.cumsum(celulas)
            self._grade = (np.concatenate((nos, novos)), np.concatenate((valores, acumulado)))
            logger.debug(f"Tabela de Phi estendida até r = {novos[-1]:.3e} ({len(self._grade[0])} nós)")

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if r.size == 0:
            return np.zeros_like(r)
        if r.max() > self._grade[0][-1]:
            self._estender(float(r.max()))
        nos, valores = self._grade
        k = np.clip(np.searchsorted(nos, r, side='right') - 1, 0, len(nos) - 1)
        return valores[k] + _integrar_gl(self._integrand, nos[k], r)


@dataclass(frozen=True)
class CommunicationKernel:
    """
    Função de peso não negativa, limitada e Lipschitz em [0, inf) (hipótese (A))
    """

    form: str
    params: Tuple[float, ...]
    _tabela: _PrimitiveTable = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.form not in FORMAS:
            raise KernelError(f"Forma desconhecida '{self.form}'. Disponíveis: {FORMAS}")
        if len(self.params) != N_PARAMETROS[self.form]:
            raise KernelError(
                f"{self.form} espera {N_PARAMETROS[self.form]} parâmetros, recebeu {len(self.params)}"
            )
        object.__setattr__(self, 'params', tuple(float(p) for p in self.params))
        if any(not math.isfinite(p) for p in self.params):
            raise KernelError(f"Parâmetros não finitos: {self.params}")

        if self.form == 'power_shift':
            a, b, c = self.params
            if a < 0 or b < 0 or c < 0:
                raise KernelError(f"power_shift exige a, b, c >= 0 (recebido {self.params})")
        elif self.form == 'ckpp':
            if self.params[0] <= 0:
                raise KernelError(f"ckpp exige beta > 0 (recebido {self.params[0]})")
        elif self.params[0] < 0:
            raise KernelError(f"constant exige c >= 0 (recebido {self.params[0]})")

        if self.form == 'power_shift':
            object.__setattr__(self, '_tabela', _PrimitiveTable(partial(_power_shift, *self.params)))

    @classmethod
    def power_shift(cls, a: float, b: float, c: float) -> "CommunicationKernel":
        return cls('power_shift', (a, b, c))

    @classmethod
    def ckpp(cls, beta: float) -> "CommunicationKernel":
        return cls('ckpp', (beta,))

    @classmethod
    def constant(cls, c: float) -> "CommunicationKernel":
        return cls('constant', (c,))

    def __str__(self) -> str:
        return f"{self.form}({', '.join(repr(p) for p in self.params)})"

    # Avaliação

    def _avaliar(self, r):
        if self.form == 'power_shift':
            return _power_shift(*self.params, r)
        if self.form == 'ckpp':
            return (1.0 + r) ** (-self.params[0])
        return np.full_like(np.asarray(r, dtype=float), self.params[0])

    def eval(self, r):
        """
        Valor pontual k(r) (aceita escalar ou array)

        Raises:
            KernelError: se algum r < 0
        """
        valores = np.asarray(r, dtype=float)
        if np.any(valores < 0):
            raise KernelError(f"Núcleo avaliado em distância negativa: min r = {valores.min()}")
        resultado = self._avaliar(valores)
        return float(resultado) if np.ndim(resultado) == 0 else resultado

    __call__ = eval

    @property
    def sup(self) -> float:
        """Supremo em [0, inf), atingido em r = 0 (núcleos não crescentes)"""
        if self.form == 'power_shift':
            a, _, c = self.params
            return a + c
        if self.form == 'ckpp':
            return 1.0
        return self.params[0]

    @property
    def inf(self) -> float:
        """Ínfimo analítico em [0, inf)"""
        if self.form == 'power_shift':
            a, b, c = self.params
            return a + c if b == 0 else c
        if self.form == 'ckpp':
            return 0.0
        return self.params[0]

    # Primitiva Phi

    def _primitiva_fechada(self, r):
        if self.form == 'constant':
            return self.params[0] * r
        beta = self.params[0]
        if beta == 1.0:
            return np.log1p(r)
        return (1.0 - (1.0 + r) ** (1.0 - beta)) / (beta - 1.0)

    def antiderivative(self, r: float) -> float:
        """
        Phi(r) = int_0^r k(s) ds para um escalar

        Forma fechada para constant e ckpp; quadratura adaptativa de
        Gauss-Kronrod (QUADPACK) com tolerância absoluta 1e-10 para power_shift.

        Raises:
            KernelError: r < 0
            QuadratureError: quadratura sem convergência
        """
        r = float(r)
        if r < 0:
            raise KernelError(f"Primitiva avaliada em r negativo: {r}")
        if r == 0.0:
            return 0.0
        if self.form != 'power_shift':
            return float(self._primitiva_fechada(r))

        a, b, c = self.params
        if a == 0.0 or b == 0.0:
            return (a + c) * r
        resultado = integrate.quad(
            lambda s: (1.0 + s * s) ** (-b), 0.0, r,
            epsabs=QUAD_EPSABS, epsrel=1e-13, limit=QUAD_LIMITE, full_output=1,
        )
        valor, erro = resultado[0], resultado[1]
        if len(resultado) == 4 and erro > max(QUAD_EPSABS, 1e-12 * abs(valor)):
            raise QuadratureError(f"Quadratura de Phi não convergiu em r = {r}: {resultado[3]}", erro)
        return a * valor + c * r

    def antiderivative_many(self, r) -> np.ndarray:
        """
        Phi avaliada em lote (caminho quente dos diagnósticos de energia)
        """
        valores = np.asarray(r, dtype=float)
        if np.any(valores < 0):
            raise KernelError("Primitiva avaliada em r negativo")
        if self.form != 'power_shift':
            return self._primitiva_fechada(valores)
        a, b, c = self.params
        if a == 0.0 or b == 0.0:
            return (a + c) * valores
        return self._tabela(valores)

    # Comportamento na cauda

    def tail_integral_diverges(self) -> bool:
        """
        True se int_0^inf k(r) dr = inf
        """
        if self.form == 'constant':
            return self.params[0] > 0
        if self.form == 'ckpp':
            return self.params[0] <= 1.0
        a, b, c = self.params
        if c > 0:
            return True
        return a > 0 and b <= 0.5

    def integral_to_infinity(self) -> float:
        """Valor de int_0^inf k(r) dr (math.inf quando diverge)"""
        if self.tail_integral_diverges():
            return math.inf
        if self.form == 'constant':
            return 0.0
        if self.form == 'ckpp':
            return 1.0 / (self.params[0] - 1.0)
        a, b, _ = self.params
        if a == 0.0:
            return 0.0
        return a * special.beta(0.5, b - 0.5) / 2.0


def antiderivative(k: CommunicationKernel, r: float) -> float:
    return k.antiderivative(r)


def tail_integral_diverges(k: CommunicationKernel) -> bool:
    return k.tail_integral_diverges()


_PADRAO_NUCLEO = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")


def parse_kernel(texto: str) -> CommunicationKernel:
    """
    Interpreta especificações como "power_shift(1.0, 0.25, 0.3)"

    Args:
        texto: Nome da forma seguido dos parâmetros numéricos

    Returns:
        Núcleo correspondente
    """
    casamento = _PADRAO_NUCLEO.match(texto)
    if not casamento:
        raise KernelError(f"Especificação de núcleo inválida: '{texto}'")
    forma, argumentos = casamento.groups()
    try:
        params = tuple(float(x) for x in argumentos.split(',') if x.strip())
    except ValueError as e:
        raise KernelError(f"Parâmetros não numéricos em '{texto}'") from e
    return CommunicationKernel(forma, params)
