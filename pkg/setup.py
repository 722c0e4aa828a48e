"""
Script de setup do simulador Cucker-Smale estocástico com controle em redes.
"""

import subprocess
import sys
from pathlib import Path

ARQUIVOS_NECESSARIOS = [
    "config.py",
    "graph.py",
    "kernels.py",
    "model.py",
    "integrator.py",
    "patterns.py",
    "ensemble.py",
    "run_config.py",
    "plots.py",
    "utils.py",
    "main.py",
    "requirements.txt",
    "README.md",
]

MODULOS_PROJETO = ["config", "graph", "kernels", "model", "integrator",
                   "patterns", "ensemble", "run_config", "utils", "main"]

CONFIGURACAO_EXEMPLO = """\
# Configuração pi: 30 agentes, G_psi = G3, G_phi = G1, G_B = G0
[model]
n_agents = 30
dim = 2
coupling = 5.0
control_strength = 7.0
noise_strength = 0.001
g_psi = G3
g_phi = G1
g_b = G0
psi = power_shift(1.0, 0.25, 0.3)
phi = power_shift(1.0, 0.25, 0.1)
targets = pi30

[stepper]
dt = 0.0125
t_end = 35.0
sample_stride = 0.25
seed = 20200212

[ensemble]
n_realizations = 100
position_box = 212.125
velocity_box = 25.0
n_workers = 4
snapshot_times = 0.0, 5.0, 35.0

[analysis]
convention = with_diagonal

[output]
directory = output/pi30
formats = csv, json, png
"""


def verificar_python():
    """Verifica versão do Python"""
    print("🐍 VERIFICANDO VERSÃO DO PYTHON...")

    version = sys.version_info
    if version < (3, 8):
        print(f"❌ Python {version.major}.{version.minor} detectado.")
        print("✅ Este projeto requer Python 3.8 ou superior.")
        return False

    print(f"✅ Python {version.major}.{version.minor}.{version.micro} - OK")
    return True


def instalar_dependencias():
    """Instala as dependências do requirements.txt"""
    print("\n📦 INSTALANDO DEPENDÊNCIAS...")

    try:
        subprocess.run([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"],
                       check=True, capture_output=True, text=True)
        print("✅ Dependências instaladas com sucesso")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Erro ao instalar dependências: {e}")
        print("Tente instalar manualmente:")
        print("pip install -r requirements.txt")
        return False


def verificar_estrutura_arquivos(raiz: Path = Path(".")):
    """Verifica se os módulos do simulador estão presentes"""
    print("\n📁 VERIFICANDO ESTRUTURA DE ARQUIVOS...")

    faltando = [arquivo for arquivo in ARQUIVOS_NECESSARIOS if not (raiz / arquivo).exists()]
    for arquivo in ARQUIVOS_NECESSARIOS:
        print(f"{'❌' if arquivo in faltando else '✅'} {arquivo}")

    if faltando:
        print(f"\n⚠️ {len(faltando)} arquivos faltando")
        return False
    print("✅ Todos os arquivos presentes")
    return True


def testar_imports_modulos():
    """Importa as dependências externas e os módulos do projeto"""
    print("\n🧪 TESTANDO IMPORTS...")

    com_erro = []
    for modulo in ["numpy", "pandas", "scipy", "matplotlib", "seaborn"] + MODULOS_PROJETO:
        try:
            __import__(modulo)
            print(f"✅ {modulo}")
        except ImportError as e:
            print(f"❌ {modulo}: {e}")
            com_erro.append(modulo)

    if com_erro:
        print(f"\n⚠️ Problemas nos módulos: {com_erro}")
        return False
    print("✅ Todos os módulos importando corretamente")
    return True


def criar_configuracao_exemplo(diretorio: Path = Path("configs")) -> Path:
    """Grava configs/pi30.ini, a configuração de referência do padrão pi"""
    print("\n📄 CRIANDO CONFIGURAÇÃO DE EXEMPLO...")

    diretorio = Path(diretorio)
    diretorio.mkdir(parents=True, exist_ok=True)
    caminho = diretorio / "pi30.ini"
    caminho.write_text(CONFIGURACAO_EXEMPLO, encoding="utf-8")
    print(f"✅ {caminho} criado")
    return caminho


def verificar_configuracao_exemplo():
    """Grava a configuração de exemplo e confere as hipóteses sem simular"""
    from run_config import RunConfig
    from model import hypotheses_report, failed_hypotheses
    from ensemble import initial_ensemble

    cfg = RunConfig.load(criar_configuracao_exemplo())
    params = cfg.build_params()
    falhas = failed_hypotheses(hypotheses_report(params, initial_ensemble(params, cfg.ensemble_config()),
                                                 cfg.analysis.convention))
    if falhas:
        print(f"❌ Hipóteses violadas na configuração de exemplo: {falhas}")
        return False
    print("✅ Configuração de exemplo satisfaz as hipóteses")
    return True


def main():
    """Função principal do setup"""
    print("🚀 SETUP DO SIMULADOR CUCKER-SMALE")
    print("=" * 60)

    etapas = [
        ("Verificar Python", verificar_python),
        ("Verificar estrutura", verificar_estrutura_arquivos),
        ("Instalar dependências", instalar_dependencias),
        ("Testar módulos", testar_imports_modulos),
        ("Configuração de exemplo", verificar_configuracao_exemplo),
    ]

    resultados = []
    for nome, funcao in etapas:
        print(f"\n{'='*20} {nome.upper()} {'='*20}")
        try:
            resultados.append((nome, funcao()))
        except Exception as e:
            print(f"❌ Erro inesperado em {nome}: {e}")
            resultados.append((nome, False))

    print("\n" + "=" * 60)
    print("📊 RESUMO DO SETUP")
    print("=" * 60)
    sucessos = sum(1 for _, resultado in resultados if resultado)
    for nome, resultado in resultados:
        print(f"{'✅' if resultado else '❌'} {nome}")
    print(f"\n🎯 RESULTADO: {sucessos}/{len(etapas)} etapas concluídas com sucesso")

    if sucessos == len(etapas):
        print("\n🎉 SETUP CONCLUÍDO COM SUCESSO!")
        print("\n📋 PRÓXIMOS PASSOS:")
        print("1. Execute: python main.py check --config configs/pi30.ini")
        print("2. Depois: python main.py simulate --config configs/pi30.ini")
        print("3. Compare redes de controle: python main.py compare --config configs/pi30.ini")
    else:
        print("\n⚠️ SETUP INCOMPLETO")
        print("Verifique os erros acima e consulte o README.md")

    return sucessos == len(etapas)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
