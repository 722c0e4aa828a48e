"""
Linha de comando do simulador Cucker-Smale estocástico com controle

Subcomandos:
  graph-info  métricas de uma rede (família G0-G4 ou lista de arestas)
  check       hipóteses dos teoremas e constantes de análise
  simulate    ensemble completo com energies.csv, snapshots e resumo
  compare     varredura de G_phi pelas famílias G0-G4

Exemplos de uso:
  python main.py graph-info G3 --n 30
  python main.py check --config configs/pi30.ini
  python main.py simulate --config configs/pi30.ini --seed 7 --out resultados
"""

import argparse
import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Optional, Tuple

from config import (
    CONVENCOES_COMPLEMENTO,
    DEFAULT_CONVENCAO,
    DESCRICAO_FAMILIAS,
    FAMILIAS_GRAFO,
    OUTPUT_COMPARACAO,
    OUTPUT_COMPARACAO_ENERGIAS,
    OUTPUT_DIAGNOSTICOS,
    OUTPUT_ENERGIAS,
    OUTPUT_FALHAS,
    OUTPUT_RESUMO,
)
from ensemble import (
    NetworkComparison,
    PartialEnsembleError,
    compare_networks,
    evaluate_checks,
    initial_ensemble,
    run,
)
from graph import (
    GraphError,
    closed_form_diameter,
    closed_form_edge_count,
    metrics,
    read_edge_list,
    resolve_graph,
)
from model import (
    HypothesisError,
    analysis_constants,
    failed_hypotheses,
    hypotheses_report,
)
from run_config import ConfigError, RunConfig
from utils import (
    carimbo_tempo,
    imprimir_relatorio,
    preparar_diretorio,
    salvar_csv,
    salvar_json,
    versoes_pacotes,
    write_diagnostics,
    write_energies,
    write_snapshots,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERRO = 1
EXIT_HIPOTESE = 2
EXIT_INTERROMPIDO = 130


FORMATO_LOG = '%(asctime)s - %(levelname)s - %(message)s'


def setup_console_logging(level: str):
    """Log só no console, antes de existir o diretório de saída"""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=FORMATO_LOG,
        handlers=[logging.StreamHandler(sys.stdout)],
        force=True,
    )


def setup_logging(level: str, diretorio) -> Path:
    """Configura o log em arquivo (no diretório de saída) e no console"""
    diretorio = preparar_diretorio(diretorio)
    log_filename = diretorio / f'simulacao_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log'

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=FORMATO_LOG,
        handlers=[
            logging.FileHandler(log_filename, encoding='utf-8'),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )
    logger.info(f"📝 Log salvo em: {log_filename}")
    return log_filename


# Subcomandos

def cmd_graph_info(spec: str, n: Optional[int] = None, convention: str = DEFAULT_CONVENCAO,
                   out: Optional[Path] = None) -> dict:
    """
    Métricas de uma rede: N, |E|, d(G), |E^c|, L_G, grau máximo, simetria e conexidade

    Args:
        spec: Nome de família (exige n) ou caminho de lista de arestas
        n: Número de vértices para famílias
        convention: Convenção do complemento
        out: Diretório para graph_info.json (opcional)

    Returns:
        Relatório em dicionário; grafo desconexo gera aviso, não erro
    """
    if spec in FAMILIAS_GRAFO:
        if n is None:
            raise GraphError(f"Família {spec} exige o número de vértices (--n)")
        grafo = resolve_graph(spec, n)
    else:
        grafo = read_edge_list(spec[5:] if spec.startswith('file:') else spec)

    relatorio = {'graph': spec, 'n_vertices': grafo.n_vertices, 'n_edges': grafo.n_edges}
    relatorio.update(metrics(grafo, convention).to_dict())
    if spec in FAMILIAS_GRAFO:
        relatorio['closed_form_edges'] = closed_form_edge_count(spec, grafo.n_vertices)
        relatorio['closed_form_diameter'] = closed_form_diameter(spec, grafo.n_vertices)
        relatorio['description'] = DESCRICAO_FAMILIAS[spec]

    if not relatorio['is_connected']:
        logger.warning(f"⚠️ {spec}: grafo desconexo, diâmetro e L_G indefinidos")
    if not relatorio['is_symmetric']:
        logger.warning(f"⚠️ {spec}: grafo não simétrico")

    imprimir_relatorio(f"Rede {spec}", relatorio)
    if out is not None:
        salvar_json(relatorio, preparar_diretorio(out) / 'graph_info.json')
    return relatorio


def cmd_check(cfg: RunConfig) -> Tuple[dict, int]:
    """
    Avalia as hipóteses e emite as constantes de análise

    Returns:
        (relatório, código de saída); o código é 2 se alguma hipótese falhar
    """
    params = cfg.build_params()
    convencao = cfg.analysis.convention
    iniciais = initial_ensemble(params, cfg.ensemble_config())
    hipoteses = hypotheses_report(params, iniciais, convencao)

    relatorio = {'convention': convencao, 'hypotheses': hipoteses}
    try:
        constantes = analysis_constants(params, convencao, cfg.analysis.margin, cfg.analysis.beta_override)
        relatorio['analysis_constants'] = constantes.to_dict()
        relatorio['analysis_constants_valid'] = {'passed': True}
    except HypothesisError as e:
        logger.warning(f"⚠️ Constantes de análise indisponíveis: {e}")
        relatorio['analysis_constants'] = None
        relatorio['analysis_constants_valid'] = {'passed': False, 'condition': e.condition}

    falhas = failed_hypotheses(hipoteses)
    substituida = hipoteses['lambda_positive'].get('superseded_by') is not None
    if not relatorio['analysis_constants_valid']['passed']:
        # lambda <= 0 com G_psi = G_B: hipóteses de flocking valem, sem constantes de decaimento
        if substituida and relatorio['analysis_constants_valid']['condition'] == "lambda > 0":
            logger.info("ℹ️ Condição geral substituída pelo limiar com G_psi = G_B; decaimento exponencial não avaliado")
        else:
            falhas.append('analysis_constants')
    relatorio['failed'] = falhas

    imprimir_relatorio("Hipóteses", hipoteses)
    if relatorio['analysis_constants']:
        imprimir_relatorio("Constantes de análise", relatorio['analysis_constants'])

    if 'json' in cfg.output.formats:
        salvar_json(relatorio, preparar_diretorio(cfg.output.directory) / 'check.json')

    if falhas:
        logger.error(f"❌ Hipóteses violadas: {falhas}")
        return relatorio, EXIT_HIPOTESE
    logger.info("✅ Todas as hipóteses satisfeitas")
    return relatorio, EXIT_OK


def _constantes_ou_none(params, cfg: RunConfig):
    try:
        return analysis_constants(params, cfg.analysis.convention, cfg.analysis.margin,
                                  cfg.analysis.beta_override)
    except HypothesisError as e:
        logger.warning(f"⚠️ Constantes de análise indisponíveis ({e}); J, c0H e c1H ficam vazios")
        return None


def cmd_simulate(cfg: RunConfig) -> Tuple[dict, int]:
    """
    Executa o ensemble e grava energies.csv, diagnostics.csv, snapshots e summary.json

    Realizações que explodem são listadas em failures.json e os resultados
    parciais são gravados mesmo assim.
    """
    inicio = time.time()
    diretorio = preparar_diretorio(cfg.output.directory)
    params = cfg.build_params()
    constantes = _constantes_ou_none(params, cfg)
    convencao = cfg.analysis.convention

    falhas = []
    try:
        serie = run(params, cfg.ensemble_config(), cfg.stepper_config(), constantes, convencao)
    except PartialEnsembleError as e:
        falhas = e.failures
        serie = e.series
        salvar_json({'failures': falhas, 'seed': cfg.stepper.seed}, diretorio / OUTPUT_FALHAS)
        if serie is None:
            logger.error("❌ Todas as realizações falharam")
            return {'failures': falhas}, EXIT_ERRO

    if 'csv' in cfg.output.formats:
        write_energies(serie, diretorio / OUTPUT_ENERGIAS)
        write_diagnostics(serie, diretorio / OUTPUT_DIAGNOSTICOS)
        write_snapshots(serie, diretorio)

    verificacoes = evaluate_checks(serie, params, constantes, convencao,
                                   cfg.analysis.flocking_tol, cfg.analysis.pattern_tol)
    resumo = {
        'generated_at': carimbo_tempo(),
        'seed': cfg.stepper.seed,
        'convention': convencao,
        'versions': {'python': sys.version.split()[0], **versoes_pacotes()},
        'analysis_constants': constantes.to_dict() if constantes else None,
        'checks': verificacoes,
        'ensemble': {k: v for k, v in serie.metadata.items() if k != 'hypotheses'},
        'hypotheses': serie.metadata['hypotheses'],
        'config': cfg.to_dict(),
        'config_text': cfg.to_text(),
        'elapsed_seconds': time.time() - inicio,
    }
    if 'json' in cfg.output.formats:
        salvar_json(resumo, diretorio / OUTPUT_RESUMO)
    if 'png' in cfg.output.formats:
        from plots import save_all
        save_all(serie, params, diretorio)

    imprimir_relatorio("Verificações", verificacoes)
    logger.info(f"⏱️ Tempo total: {resumo['elapsed_seconds']:.1f}s")
    return resumo, EXIT_ERRO if falhas else EXIT_OK


def cmd_compare(cfg: RunConfig) -> Tuple[NetworkComparison, int]:
    """
    Ensemble para cada G_phi em G0-G4 com G_psi e G_B fixos

    Grava compare.csv (valores finais), compare_energies.csv (H, J, c0H e c1H
    ao longo do tempo, por família) e as figuras sobrepostas se png for pedido.
    """
    diretorio = preparar_diretorio(cfg.output.directory)
    params = cfg.build_params()
    comparacao = compare_networks(params, cfg.ensemble_config(), cfg.stepper_config(),
                                  cfg.analysis.convention, cfg.analysis.margin)
    salvar_csv(comparacao.table, diretorio / OUTPUT_COMPARACAO)
    salvar_csv(comparacao.energies_long(), diretorio / OUTPUT_COMPARACAO_ENERGIAS)
    if 'png' in cfg.output.formats:
        from plots import save_compare
        save_compare(comparacao, diretorio)
    logger.info(f"\n{comparacao.table.to_string(index=False)}")
    return comparacao, EXIT_OK


# Entrada

def _parser() -> argparse.ArgumentParser:
    comum = argparse.ArgumentParser(add_help=False)
    comum.add_argument("--config", help="Arquivo de configuração INI")
    comum.add_argument("--seed", type=int, help="Sobrescreve a semente (inteiro de 64 bits)")
    comum.add_argument("--convention", choices=CONVENCOES_COMPLEMENTO,
                       help="Convenção do complemento do conjunto de arestas")
    comum.add_argument("--out", help="Diretório de saída")
    comum.add_argument("--log-level", default="INFO", choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                       help="Nível de log")

    parser = argparse.ArgumentParser(
        description="Simulador Cucker-Smale estocástico com controle em redes",
        epilog=__doc__.split("Exemplos de uso:")[1] if __doc__ else None,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="comando", required=True)

    info = sub.add_parser("graph-info", parents=[comum], help="Métricas de uma rede")
    info.add_argument("graph", help="Família G0-G4 ou caminho de lista de arestas")
    info.add_argument("--n", type=int, help="Número de vértices (famílias)")

    sub.add_parser("check", parents=[comum], help="Hipóteses e constantes de análise")
    sub.add_parser("simulate", parents=[comum], help="Executa o ensemble")
    sub.add_parser("compare", parents=[comum], help="Compara redes de controle G0-G4")
    return parser


def main(argv=None) -> int:
    """Função principal para execução via linha de comando"""
    args = _parser().parse_args(argv)
    setup_console_logging(args.log_level)

    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        cfg = cfg.with_overrides(seed=args.seed, convention=args.convention, directory=args.out)
        setup_logging(args.log_level, cfg.output.directory)
        logger.info(f"🚀 Comando: {args.comando}")

        if args.comando == "graph-info":
            n = args.n if args.n is not None else cfg.model.n_agents
            cmd_graph_info(args.graph, n, cfg.analysis.convention, Path(args.out) if args.out else None)
            return EXIT_OK
        if args.comando == "check":
            return cmd_check(cfg)[1]
        if args.comando == "simulate":
            return cmd_simulate(cfg)[1]
        return cmd_compare(cfg)[1]

    except KeyboardInterrupt:
        print("\n⚠️ Execução interrompida pelo usuário.")
        return EXIT_INTERROMPIDO

    except ConfigError as e:
        logger.error(f"❌ Erro de configuração: {e}")
        return EXIT_ERRO

    except Exception as e:
        logger.error(f"❌ Erro durante a execução: {e}")
        return EXIT_ERRO


if __name__ == "__main__":
    sys.exit(main())
