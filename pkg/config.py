"""
Configurações e constantes do simulador Cucker-Smale estocástico com controle
"""

# Convenção para o complemento do conjunto de arestas
CONVENCAO_COM_DIAGONAL = "with_diagonal"
CONVENCAO_SEM_DIAGONAL = "off_diagonal"
CONVENCOES_COMPLEMENTO = [CONVENCAO_COM_DIAGONAL, CONVENCAO_SEM_DIAGONAL]
DEFAULT_CONVENCAO = CONVENCAO_COM_DIAGONAL

# Famílias de redes
FAMILIAS_GRAFO = ['G0', 'G1', 'G2', 'G3', 'G4']
MINIMO_VERTICES = {'G0': 2, 'G1': 2, 'G2': 2, 'G3': 5, 'G4': 2}
DESCRICAO_FAMILIAS = {
    'G0': "grafo completo: todo par i != j ligado",
    'G1': "caminho 1-2-...-N mais os hubs 1, floor(N/2) e N ligados a todos",
    'G2': "caminho 1-2-...-N (|i - j| = 1)",
    'G3': "circulante: i ligado a i + s (mod N), s = 2 (N ímpar), N/2 - 1 (N = 0 mod 4), N/2 - 2 (N = 2 mod 4)",
    'G4': "anel (|i - j| = 1 ou N - 1) mais os hubs i = 1 (mod 10) ligados a todos",
}

# Integrador
DEFAULT_DT = 0.0125
DEFAULT_SEED = 20200212
ESQUEMA_IMPROVED_EM = "improved_em"
ESQUEMA_EULER_MARUYAMA = "euler_maruyama"
ESQUEMAS = [ESQUEMA_IMPROVED_EM, ESQUEMA_EULER_MARUYAMA]
DEFAULT_ESQUEMA = ESQUEMA_IMPROVED_EM
TOLERANCIA_GRADE = 1e-9

# Quadratura da primitiva
QUAD_EPSABS = 1e-10
QUAD_LIMITE = 10_000

# Constantes de análise
DEFAULT_MARGEM_BETA = 1e-6

# Ensemble (parâmetros do experimento do padrão pi)
DEFAULT_REALIZACOES = 100
DEFAULT_CAIXA_POSICAO = 212.125
DEFAULT_CAIXA_VELOCIDADE = 25.0
DEFAULT_T_FINAL = 35.0
DEFAULT_PASSO_AMOSTRA = 0.25
FOLGA_SE = 3.0
TOLERANCIA_DETERMINISTICA = 1e-12

# Parâmetros do experimento do padrão pi
PI_CONFIG = {
    'n_agents': 30,
    'dim': 2,
    'coupling': 5.0,
    'control_strength': 7.0,
    'noise_strength': 1e-3,
    'psi': 'power_shift(1.0, 0.25, 0.3)',
    'phi': 'power_shift(1.0, 0.25, 0.1)',
    'g_psi': 'G3',
    'g_phi': 'G1',
    'g_b': 'G0',
    'targets': 'pi30',
}

# Arquivos de saída
OUTPUT_DIR = "output"
OUTPUT_ENERGIAS = "energies.csv"
OUTPUT_DIAGNOSTICOS = "diagnostics.csv"
OUTPUT_RESUMO = "summary.json"
OUTPUT_FALHAS = "failures.json"
OUTPUT_COMPARACAO = "compare.csv"
OUTPUT_COMPARACAO_ENERGIAS = "compare_energies.csv"
PREFIXO_SNAPSHOT = "snapshot_t"

# Formato CSV (17 dígitos significativos para replay bit a bit)
CSV_FLOAT_FORMAT = "%.16e"
FILE_ENCODING_OUTPUT = "utf-8"

# Colunas do energies.csv
COLUNAS_ENERGIA = [
    't', 'kinetic', 'kinetic_se', 'H', 'H_se', 'J', 'J_se', 'c0H', 'c1H',
    'maxpair_v', 'maxpair_x', 'budget_lhs', 'budget_rhs'
]

# Formato longo do compare: uma linha por (família de G_phi, instante)
COLUNAS_COMPARACAO_ENERGIA = [
    'family', 't', 'kinetic', 'kinetic_se', 'H', 'H_se', 'J', 'J_se', 'c0H', 'c1H'
]
