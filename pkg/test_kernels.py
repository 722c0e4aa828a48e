"""
Testes dos núcleos de comunicação e das primitivas Phi
"""

import math

import numpy as np
import pytest

from kernels import (
    CommunicationKernel,
    KernelError,
    antiderivative,
    parse_kernel,
    tail_integral_diverges,
)
from test_basic import executar_testes


def testar_valores_pontuais():
    psi = CommunicationKernel.power_shift(1.0, 0.25, 0.3)
    assert psi(0.0) == pytest.approx(1.3)
    assert psi(1.0) == pytest.approx(2 ** -0.25 + 0.3)
    assert CommunicationKernel.ckpp(2.0)(1.0) == pytest.approx(0.25)
    assert CommunicationKernel.constant(0.7)(123.0) == pytest.approx(0.7)

    valores = psi.eval(np.array([0.0, 1.0, 10.0]))
    assert valores.shape == (3,)
    assert np.all(np.diff(valores) < 0)


def testar_supremo_infimo():
    psi = CommunicationKernel.power_shift(1.0, 0.25, 0.3)
    phi = CommunicationKernel.power_shift(1.0, 0.25, 0.1)
    assert psi.sup == pytest.approx(1.3) and psi.inf == pytest.approx(0.3)
    assert phi.sup == pytest.approx(1.1) and phi.inf == pytest.approx(0.1)
    assert CommunicationKernel.ckpp(2.0).sup == 1.0
    assert CommunicationKernel.ckpp(2.0).inf == 0.0
    assert CommunicationKernel.power_shift(2.0, 0.0, 0.5).inf == pytest.approx(2.5)


def testar_primitivas_fechadas():
    """ckpp e constant contra as formas fechadas"""
    assert CommunicationKernel.ckpp(2.0).antiderivative(3.0) == pytest.approx(1.0 - 1.0 / 4.0)
    assert CommunicationKernel.ckpp(1.0).antiderivative(3.0) == pytest.approx(math.log(4.0))
    assert CommunicationKernel.constant(0.5).antiderivative(8.0) == pytest.approx(4.0)
    assert CommunicationKernel.power_shift(1.0, 0.0, 0.5).antiderivative(2.0) == pytest.approx(3.0)


def testar_quadratura():
    """power_shift com b = 1/2 e b = 1 tem primitivas asinh e atan"""
    meia = CommunicationKernel.power_shift(1.0, 0.5, 0.0)
    inteira = CommunicationKernel.power_shift(2.0, 1.0, 0.25)
    for r in (0.1, 1.0, 3.0, 250.0, 1e5):
        assert abs(meia.antiderivative(r) - math.asinh(r)) <= 1e-10 * max(1.0, math.asinh(r))
        esperado = 2.0 * math.atan(r) + 0.25 * r
        assert abs(inteira.antiderivative(r) - esperado) <= 1e-10 * max(1.0, esperado)
    assert meia.antiderivative(0.0) == 0.0


def testar_tabela_contra_quadratura():
    """Avaliação em lote concorda com a quadratura adaptativa"""
    phi = CommunicationKernel.power_shift(1.0, 0.25, 0.1)
    pontos = np.array([0.0, 0.3, 7.5, 1234.5, 4.2e4, 3.1e5])
    lote = phi.antiderivative_many(pontos)
    for r, valor in zip(pontos, lote):
        referencia = phi.antiderivative(r)
        assert abs(valor - referencia) <= 1e-10 * max(1.0, abs(referencia))

    atan = CommunicationKernel.power_shift(1.0, 1.0, 0.0).antiderivative_many(np.array([0.5, 3.0, 1e4]))
    np.testing.assert_allclose(atan, np.arctan([0.5, 3.0, 1e4]), rtol=1e-10)


def testar_tabela_extensao_incremental():
    """Consultas crescentes estendem a tabela sem mudar valores anteriores"""
    phi = CommunicationKernel.power_shift(1.0, 0.25, 0.1)
    antes = phi.antiderivative_many(np.array([5.0]))[0]
    phi.antiderivative_many(np.array([1e6]))
    depois = phi.antiderivative_many(np.array([5.0]))[0]
    assert abs(antes - depois) <= 1e-12 * abs(antes)


def testar_cauda():
    """Divergência da integral na cauda e valor quando converge"""
    assert tail_integral_diverges(CommunicationKernel.power_shift(1.0, 0.25, 0.1))
    assert tail_integral_diverges(CommunicationKernel.power_shift(1.0, 0.5, 0.0))
    assert tail_integral_diverges(CommunicationKernel.ckpp(1.0))
    assert tail_integral_diverges(CommunicationKernel.constant(1.0))
    assert not tail_integral_diverges(CommunicationKernel.constant(0.0))

    ckpp = CommunicationKernel.ckpp(2.0)
    assert not ckpp.tail_integral_diverges()
    assert ckpp.integral_to_infinity() == pytest.approx(1.0)

    lorentz = CommunicationKernel.power_shift(1.0, 1.0, 0.0)
    assert not lorentz.tail_integral_diverges()
    assert lorentz.integral_to_infinity() == pytest.approx(math.pi / 2)

    assert math.isinf(CommunicationKernel.ckpp(0.5).integral_to_infinity())


def testar_parse():
    assert parse_kernel("power_shift(1.0, 0.25, 0.3)") == CommunicationKernel.power_shift(1.0, 0.25, 0.3)
    assert parse_kernel(" ckpp( 2 ) ") == CommunicationKernel.ckpp(2.0)
    assert parse_kernel("constant(1)") == CommunicationKernel.constant(1.0)
    assert str(CommunicationKernel.ckpp(2.0)) == "ckpp(2.0)"
    assert parse_kernel(str(CommunicationKernel.power_shift(1.0, 0.25, 0.1))).params == (1.0, 0.25, 0.1)


def testar_erros():
    with pytest.raises(KernelError):
        parse_kernel("gaussian(1.0)")
    with pytest.raises(KernelError):
        parse_kernel("ckpp(a)")
    with pytest.raises(KernelError):
        parse_kernel("power_shift(1.0, 0.25)")
    with pytest.raises(KernelError):
        CommunicationKernel.power_shift(-1.0, 0.25, 0.3)
    with pytest.raises(KernelError):
        CommunicationKernel.ckpp(0.0)
    with pytest.raises(KernelError):
        CommunicationKernel.constant(math.inf)

    psi = CommunicationKernel.power_shift(1.0, 0.25, 0.3)
    with pytest.raises(KernelError):
        psi.eval(-1.0)
    with pytest.raises(KernelError):
        antiderivative(psi, -0.5)
    with pytest.raises(KernelError):
        psi.antiderivative_many(np.array([1.0, -2.0]))


NUCLEOS_AMOSTRA = [
    CommunicationKernel.power_shift(1.0, 0.25, 0.3),
    CommunicationKernel.power_shift(1.0, 0.25, 0.1),
    CommunicationKernel.power_shift(2.0, 1.0, 0.0),
    CommunicationKernel.ckpp(2.0),
    CommunicationKernel.ckpp(0.5),
    CommunicationKernel.constant(0.7),
]


def testar_valor_medio():
    """inf (r2 - r1) <= Phi(r2) - Phi(r1) <= sup (r2 - r1) em pares aleatórios"""
    rng = np.random.default_rng(2024)
    pares = np.sort(rng.uniform(0.0, 1e4, size=(1000, 2)), axis=1)
    largura = pares[:, 1] - pares[:, 0]
    for nucleo in NUCLEOS_AMOSTRA:
        incremento = nucleo.antiderivative_many(pares[:, 1]) - nucleo.antiderivative_many(pares[:, 0])
        folga = 1e-9 * np.maximum(1.0, np.abs(nucleo.antiderivative_many(pares[:, 1])))
        assert np.all(incremento >= nucleo.inf * largura - folga), str(nucleo)
        assert np.all(incremento <= nucleo.sup * largura + folga), str(nucleo)


def testar_derivada_finita():
    """Diferença central de Phi reproduz k"""
    for nucleo in NUCLEOS_AMOSTRA:
        for r in (0.05, 0.7, 3.0, 40.0, 900.0, 2.5e4):
            h = 1e-3 * max(1.0, r)
            derivada = (nucleo.antiderivative(r + h) - nucleo.antiderivative(r - h)) / (2.0 * h)
            assert derivada == pytest.approx(nucleo(r), rel=1e-5), (str(nucleo), r)


def testar_simpson():
    """Simpson composto com 10^6 painéis contra Phi(1) de power_shift(1, 0.25, 0.1)"""
    phi = CommunicationKernel.power_shift(1.0, 0.25, 0.1)
    paineis = 10 ** 6
    s = np.linspace(0.0, 1.0, paineis + 1)
    valores = phi.eval(s)
    h = 1.0 / paineis
    simpson = h / 3.0 * (valores[0] + valores[-1]
                         + 4.0 * valores[1:-1:2].sum() + 2.0 * valores[2:-1:2].sum())
    assert abs(simpson - phi.antiderivative(1.0)) <= 1e-11
    assert abs(simpson - phi.antiderivative_many(np.array([1.0]))[0]) <= 1e-10


def testar_primitiva_distancias_extremas():
    phi = CommunicationKernel.power_shift(1.0, 0.25, 0.1)
    anterior = 0.0
    for r in (1e6, 1e9, 1e12, 1e14):
        valor = phi.antiderivative(r)
        assert math.isfinite(valor) and valor > anterior
        anterior = valor


def testar_monotonia_eval():
    """k não cresce numa malha densa de [0, 1e6]"""
    malha = np.concatenate([np.linspace(0.0, 10.0, 5001), np.geomspace(10.0, 1e6, 5000)[1:]])
    for nucleo in NUCLEOS_AMOSTRA:
        valores = nucleo.eval(malha)
        assert np.all(np.diff(valores) <= 0.0), str(nucleo)
        assert np.all(valores >= nucleo.inf) and np.all(valores <= nucleo.sup + 1e-15)


def executar_todos_testes():
    testes = [
        ("Valores Pontuais", testar_valores_pontuais),
        ("Supremo e Ínfimo", testar_supremo_infimo),
        ("Primitivas Fechadas", testar_primitivas_fechadas),
        ("Quadratura", testar_quadratura),
        ("Tabela x Quadratura", testar_tabela_contra_quadratura),
        ("Extensão da Tabela", testar_tabela_extensao_incremental),
        ("Cauda", testar_cauda),
        ("Parse", testar_parse),
        ("Erros", testar_erros),
        ("Valor Médio", testar_valor_medio),
        ("Derivada Finita", testar_derivada_finita),
        ("Simpson", testar_simpson),
        ("Distâncias Extremas", testar_primitiva_distancias_extremas),
        ("Monotonia", testar_monotonia_eval),
    ]
    return executar_testes("TESTES DOS NÚCLEOS", testes)


if __name__ == "__main__":
    executar_todos_testes()
