"""
Testes da configuração INI, dos alvos e dos subcomandos da linha de comando
"""

import io
import json
import logging
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from config import (
    COLUNAS_COMPARACAO_ENERGIA,
    COLUNAS_ENERGIA,
    DEFAULT_CAIXA_POSICAO,
    DESCRICAO_FAMILIAS,
    FAMILIAS_GRAFO,
)
from graph import build_family, circulant_offset
from main import EXIT_ERRO, EXIT_HIPOTESE, EXIT_OK, cmd_check, cmd_compare, cmd_graph_info, cmd_simulate, main
from patterns import PatternError, builtin_pattern, load_targets, pi_pattern, resolve_targets
from run_config import ConfigError, RunConfig
from setup import criar_configuracao_exemplo
from test_basic import executar_testes

CONFIG_PEQUENA = """
[model]
n_agents = 5
coupling = 0.0
control_strength = 0.0
noise_strength = 0.0
g_psi = G0
g_phi = G0
g_b = G0
targets = ring5

[stepper]
t_end = 1.0
sample_stride = 0.5
seed = 77

[ensemble]
n_realizations = 2
velocity_box = 0.0
snapshot_times = 1.0

[output]
directory = {diretorio}
formats = csv, json
"""


def _salvar_alvos(caminho: Path, linhas: int, colunas: int = 2):
    dados = np.arange(linhas * colunas, dtype=float).reshape(linhas, colunas)
    np.savetxt(caminho, dados, delimiter=',', header='alvos', comments='# ')


# Alvos

def testar_alvos_csv():
    with tempfile.TemporaryDirectory() as tmp:
        caminho = Path(tmp) / 'alvos.csv'
        _salvar_alvos(caminho, 30)
        alvos = load_targets(caminho, 30, 2)
        assert alvos.shape == (30, 2)
        assert alvos[1, 0] == 2.0

        with pytest.raises(PatternError):
            load_targets(caminho, 29, 2)
        curto = Path(tmp) / 'curto.csv'
        _salvar_alvos(curto, 29)
        with pytest.raises(PatternError):
            resolve_targets('curto.csv', 30, 2, Path(tmp))

        texto = Path(tmp) / 'texto.csv'
        texto.write_text("1.0, 2.0\n3.0, abc\n", encoding='utf-8')
        with pytest.raises(PatternError) as info:
            load_targets(texto)
        assert 'linha 2' in str(info.value)

        with pytest.raises(PatternError):
            load_targets(Path(tmp) / 'inexistente.csv')
        vazio = Path(tmp) / 'vazio.csv'
        vazio.write_text("", encoding='utf-8')
        with pytest.raises(PatternError):
            load_targets(vazio)


def testar_padroes_embutidos():
    alvos = pi_pattern(30)
    assert alvos.shape == (30, 2)
    assert np.all(np.abs(alvos) <= DEFAULT_CAIXA_POSICAO)
    assert np.array_equal(alvos, builtin_pattern('pi30'))
    assert builtin_pattern('ring12').shape == (12, 2)
    assert builtin_pattern('estrela7') is None
    with pytest.raises(PatternError):
        resolve_targets('pi30', 31, 2)
    with pytest.raises(PatternError):
        resolve_targets('pi30', 30, 3)


# Configuração

def testar_configuracao_padrao():
    cfg = RunConfig()
    assert cfg.model.n_agents == 30
    assert cfg.model.g_psi == 'G3' and cfg.model.g_phi == 'G1' and cfg.model.g_b == 'G0'
    assert cfg.stepper.dt == 0.0125
    assert cfg.ensemble.n_realizations == 100
    tempos = cfg.resolved_sample_times()
    assert tempos[0] == 0.0 and tempos[-1] == pytest.approx(35.0)
    assert len(tempos) == 141


def testar_ida_e_volta():
    texto = CONFIG_PEQUENA.format(diretorio='saida_teste')
    cfg = RunConfig.from_text(texto)
    assert RunConfig.from_text(cfg.to_text()) == cfg
    assert RunConfig.from_text(RunConfig().to_text()) == RunConfig()

    alterado = cfg.with_overrides(seed=5, convention='off_diagonal', directory='outro')
    assert alterado.stepper.seed == 5
    assert alterado.analysis.convention == 'off_diagonal'
    assert RunConfig.from_text(alterado.to_text()) == alterado
    assert alterado.ensemble_config().seed == 5


def testar_erros_com_linha():
    texto = "[model]\nn_agents = 30\ncoupling = abc\n"
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text(texto)
    assert info.value.line == 3
    assert info.value.section == 'model'
    assert info.value.key == 'coupling'

    with pytest.raises(ConfigError) as info:
        RunConfig.from_text("[stepper]\n\ndt = 0.01\nvelocidade = 3\n")
    assert info.value.line == 4

    with pytest.raises(ConfigError):
        RunConfig.from_text("[modelo]\nn_agents = 3\n")
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text("[model]\ntargets = nao_existe.csv\n")
    assert info.value.key == 'targets'
    with pytest.raises(ConfigError):
        RunConfig.from_text("[analysis]\nconvention = diagonal\n")
    with pytest.raises(ConfigError):
        RunConfig.from_text("[output]\nformats = csv, xlsx\n")
    with pytest.raises(ConfigError):
        RunConfig.from_text("[model]\nnoise_strength = -1\n")


def testar_parametros_construidos():
    params = RunConfig().build_params()
    assert params.n_agents == 30
    assert params.g_psi.n_edges == 60
    assert params.psi.inf == pytest.approx(0.3)

    with tempfile.TemporaryDirectory() as tmp:
        (Path(tmp) / 'z.csv').write_text("0,0\n1,0\n0,1\n", encoding='utf-8')
        texto = "[model]\nn_agents = 4\ng_psi = G0\ng_phi = G0\ng_b = G0\ntargets = z.csv\n"
        cfg = RunConfig.from_text(texto, base_dir=Path(tmp))
        with pytest.raises(ConfigError):
            cfg.build_params()


# Subcomandos

def testar_graph_info():
    relatorio = cmd_graph_info('G3', 30)
    assert relatorio['n_edges'] == 60
    assert relatorio['diameter'] == 15
    assert relatorio['connectivity_constant'] == '1/12601'

    assert cmd_graph_info('G4', 30)['diameter'] == 2
    assert cmd_graph_info('G0', 5, 'with_diagonal')['connectivity_constant'] == '1/6'
    assert cmd_graph_info('G0', 5, 'off_diagonal')['connectivity_constant'] == '1'

    with tempfile.TemporaryDirectory() as tmp:
        caminho = Path(tmp) / 'desconexo.txt'
        caminho.write_text("4\n1 2\n2 1\n3 4\n4 3\n", encoding='utf-8')
        relatorio = cmd_graph_info(str(caminho), out=Path(tmp))
        assert relatorio['is_connected'] is False
        assert relatorio['diameter'] is None
        salvo = json.loads((Path(tmp) / 'graph_info.json').read_text(encoding='utf-8'))
        assert salvo['n_edges'] == 4


def testar_descricao_familias():
    """Descrições das famílias batem com a construção e com o README"""
    readme = (Path(__file__).parent / "README.md").read_text(encoding="utf-8").replace("\\|", "|")
    assert "Itô" in readme
    assert "Stratonovich" not in readme
    for familia in FAMILIAS_GRAFO:
        relatorio = cmd_graph_info(familia, 30)
        assert relatorio["description"] == DESCRICAO_FAMILIAS[familia]
        assert DESCRICAO_FAMILIAS[familia] in readme

    n = 30
    hubs = lambda g: {i for i, vizinhos in g.neighbors.items() if len(vizinhos) == n - 1}
    assert hubs(build_family("G1", n)) == {1, n // 2, n}
    assert hubs(build_family("G4", n)) == {1, 11, 21}
    assert build_family("G2", n).neighbors[5] == [4, 6]
    s = circulant_offset(n)
    assert build_family("G3", n).neighbors[1] == sorted({1 + s, (1 - s - 1) % n + 1})
    assert set(build_family("G4", n).neighbors[2]) >= {1, 3}
    assert n in build_family("G4", n).neighbors[1]


def testar_check_codigos():
    with tempfile.TemporaryDirectory() as tmp:
        base = RunConfig().with_overrides(directory=tmp)
        relatorio, codigo = cmd_check(base)
        assert codigo == EXIT_OK
        assert relatorio['analysis_constants']['lam'] == pytest.approx(9.0038e-5, rel=1e-3)
        assert (Path(tmp) / 'check.json').exists()

        fraco = RunConfig.from_text(
            f"[model]\ncoupling = 1e-9\nnoise_strength = 1.0\n[output]\ndirectory = {tmp}\n"
        )
        relatorio, codigo = cmd_check(fraco)
        assert codigo == EXIT_HIPOTESE
        assert 'coupling_condition' in relatorio['failed']

        violada = RunConfig.from_text(
            f"[model]\nphi = ckpp(2.0)\ncontrol_strength = 2.0\n"
            f"[ensemble]\nvelocity_box = 10000.0\n[output]\ndirectory = {tmp}\n"
        )
        relatorio, codigo = cmd_check(violada)
        assert codigo == EXIT_HIPOTESE
        assert relatorio['hypotheses']['initial_condition']['status'] == 'violated'

        mesmo_grafo = RunConfig.from_text(
            f"[model]\ng_psi = G2\ng_b = G2\nnoise_strength = 0.1\n[output]\ndirectory = {tmp}\n"
        )
        relatorio, codigo = cmd_check(mesmo_grafo)
        assert codigo == EXIT_OK, relatorio['failed']
        assert relatorio['hypotheses']['coupling_condition']['superseded_by'] == 'coupling_condition_same_graph'
        assert relatorio['analysis_constants'] is None


def testar_simulate_reprodutivel():
    """Mesma configuração e semente: energies.csv idêntico byte a byte"""
    with tempfile.TemporaryDirectory() as tmp:
        arquivos = []
        for nome in ('a', 'b'):
            diretorio = Path(tmp) / nome
            cfg = RunConfig.from_text(CONFIG_PEQUENA.format(diretorio=diretorio))
            resumo, codigo = cmd_simulate(cfg)
            assert codigo == EXIT_OK
            arquivos.append((diretorio / 'energies.csv').read_bytes())

        assert arquivos[0] == arquivos[1]
        energias = pd.read_csv(Path(tmp) / 'a' / 'energies.csv')
        assert list(energias.columns) == COLUNAS_ENERGIA
        np.testing.assert_allclose(energias['H'], energias['H'][0], rtol=1e-12)
        assert (Path(tmp) / 'a' / 'snapshot_t1.0000_r0.csv').exists()
        assert (Path(tmp) / 'a' / 'diagnostics.csv').exists()

        resumo = json.loads((Path(tmp) / 'a' / 'summary.json').read_text(encoding='utf-8'))
        assert resumo['seed'] == 77
        assert resumo['analysis_constants'] is None
        assert RunConfig.from_text(resumo['config_text']) == RunConfig.from_text(
            CONFIG_PEQUENA.format(diretorio=Path(tmp) / 'a'))


def testar_compare():
    """Uma linha por família de G_phi, gravada em compare.csv"""
    with tempfile.TemporaryDirectory() as tmp:
        cfg = RunConfig.from_text(CONFIG_PEQUENA.format(diretorio=tmp))
        comparacao, codigo = cmd_compare(cfg)
        tabela = comparacao.table
        assert codigo == EXIT_OK
        assert list(tabela["family"]) == ["G0", "G1", "G2", "G3", "G4"]
        assert tabela["beta_min"].isna().all()
        salvo = pd.read_csv(Path(tmp) / "compare.csv")
        assert len(salvo) == 5
        assert set(salvo.columns) >= {"family", "final_H", "H_ratio", "kinetic_ratio"}

        longo = pd.read_csv(Path(tmp) / "compare_energies.csv")
        assert list(longo.columns) == COLUNAS_COMPARACAO_ENERGIA
        assert len(longo) == 5 * 3
        assert list(longo["family"].unique()) == ["G0", "G1", "G2", "G3", "G4"]


def testar_compare_series_temporais():
    """Com controle ligado: c0H <= J <= c1H por família e figuras sobrepostas"""
    with tempfile.TemporaryDirectory() as tmp:
        texto = (
            "[model]\nn_agents = 5\ng_psi = G0\ng_phi = G0\ng_b = G0\ntargets = ring5\n"
            "[stepper]\nt_end = 0.5\nsample_stride = 0.25\n"
            "[ensemble]\nn_realizations = 2\n"
            f"[output]\ndirectory = {tmp}\nformats = csv, png\n"
        )
        comparacao, codigo = cmd_compare(RunConfig.from_text(texto))
        assert codigo == EXIT_OK
        assert comparacao.families == ["G0", "G1", "G2", "G3", "G4"]

        longo = comparacao.energies_long()
        assert len(longo) == 5 * 3
        assert longo["J"].notna().all()
        folga = 1e-9 * longo["J"].abs()
        assert (longo["c0H"] <= longo["J"] + folga).all()
        assert (longo["J"] <= longo["c1H"] + folga).all()
        for familia, serie in comparacao.series.items():
            parte = longo[longo["family"] == familia]
            np.testing.assert_array_equal(parte["H"].to_numpy(), serie.mean("H"))

        assert (Path(tmp) / "compare_energies.png").exists()
        assert (Path(tmp) / "compare_sandwich.png").exists()


def testar_main_codigos_saida():
    with tempfile.TemporaryDirectory() as tmp:
        assert main(['graph-info', 'G3', '--n', '30', '--out', tmp]) == EXIT_OK
        assert (Path(tmp) / 'graph_info.json').exists()
        assert main(['check', '--config', str(Path(tmp) / 'inexistente.ini'), '--out', tmp]) == EXIT_ERRO

        configuracao = Path(tmp) / 'fraco.ini'
        configuracao.write_text("[model]\ncoupling = 1e-9\nnoise_strength = 1.0\n", encoding='utf-8')
        assert main(['check', '--config', str(configuracao), '--out', tmp]) == EXIT_HIPOTESE

        pequena = Path(tmp) / 'pequena.ini'
        pequena.write_text(CONFIG_PEQUENA.format(diretorio=tmp), encoding='utf-8')
        assert main(['simulate', '--config', str(pequena), '--seed', '3']) == EXIT_OK
        resumo = json.loads((Path(tmp) / 'summary.json').read_text(encoding='utf-8'))
        assert resumo['seed'] == 3


def testar_log_erro_configuracao():
    """Erro ao carregar o INI sai pelo console já formatado"""
    with tempfile.TemporaryDirectory() as tmp:
        ruim = Path(tmp) / 'ruim.ini'
        ruim.write_text("[model]\nchave_desconhecida = 1\n", encoding='utf-8')
        saida = io.StringIO()
        try:
            with redirect_stdout(saida):
                codigo = main(['check', '--config', str(ruim)])
        finally:
            raiz = logging.getLogger()
            for handler in list(raiz.handlers):
                raiz.removeHandler(handler)
    assert codigo == EXIT_ERRO
    linhas = [linha for linha in saida.getvalue().splitlines() if "Erro de configuração" in linha]
    assert len(linhas) == 1
    assert " - ERROR - ❌ Erro de configuração" in linhas[0]
    assert "chave_desconhecida" in linhas[0]


def testar_configuracao_exemplo():
    """configs/pi30.ini reproduz os parâmetros padrão do modelo"""
    with tempfile.TemporaryDirectory() as tmp:
        cfg = RunConfig.load(criar_configuracao_exemplo(Path(tmp)))
    assert cfg.model == RunConfig().model
    assert cfg.ensemble.snapshot_times == (0.0, 5.0, 35.0)
    assert cfg.output.formats == ("csv", "json", "png")
    assert RunConfig.load(Path(__file__).parent / "configs" / "pi30.ini") == cfg


def executar_todos_testes():
    testes = [
        ("Alvos CSV", testar_alvos_csv),
        ("Padrões Embutidos", testar_padroes_embutidos),
        ("Configuração Padrão", testar_configuracao_padrao),
        ("Ida e Volta", testar_ida_e_volta),
        ("Erros com Linha", testar_erros_com_linha),
        ("Parâmetros Construídos", testar_parametros_construidos),
        ("graph-info", testar_graph_info),
        ("Descrição das Famílias", testar_descricao_familias),
        ("check", testar_check_codigos),
        ("simulate Reprodutível", testar_simulate_reprodutivel),
        ("compare", testar_compare),
        ("compare Séries Temporais", testar_compare_series_temporais),
        ("Códigos de Saída", testar_main_codigos_saida),
        ("Log de Erro de Configuração", testar_log_erro_configuracao),
        ("Configuração de Exemplo", testar_configuracao_exemplo),
    ]
    return executar_testes("TESTES DA LINHA DE COMANDO", testes)


if __name__ == "__main__":
    executar_todos_testes()
