"""
Configuração de execução em texto INI com seções tipadas:

    [model]     N, d, K, M, sigma, grafos, núcleos e alvos
    [stepper]   dt, t_end, instantes de amostragem, semente, esquema
    [ensemble]  R, caixas, deslocamentos, modo de dado inicial comum
    [analysis]  convenção do complemento, beta, margens e tolerâncias
    [output]    diretório e formatos

Chaves ausentes assumem os padrões de config.py (o experimento do padrão pi).
RunConfig.to_text() serializa de volta; parse(to_text()) é a identidade.
"""

import configparser
import logging
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from config import (
    CONVENCOES_COMPLEMENTO,
    DEFAULT_CAIXA_POSICAO,
    DEFAULT_CAIXA_VELOCIDADE,
    DEFAULT_CONVENCAO,
    DEFAULT_DT,
    DEFAULT_ESQUEMA,
    DEFAULT_MARGEM_BETA,
    DEFAULT_PASSO_AMOSTRA,
    DEFAULT_REALIZACOES,
    DEFAULT_SEED,
    DEFAULT_T_FINAL,
    ESQUEMAS,
    FAMILIAS_GRAFO,
    OUTPUT_DIR,
    PI_CONFIG,
    TOLERANCIA_GRADE,
)
from ensemble import EnsembleConfig
from graph import GraphError, resolve_graph
from integrator import StepperConfig
from kernels import KernelError, parse_kernel
from model import ModelError, ModelParams
from patterns import PatternError, builtin_pattern, resolve_targets

logger = logging.getLogger(__name__)

FORMATOS_SAIDA = ('csv', 'json', 'png')


class ConfigError(ValueError):
    """Erro de configuração com seção, chave e linha quando conhecidas"""

    def __init__(self, mensagem: str, section: Optional[str] = None, key: Optional[str] = None,
                 line: Optional[int] = None, source: str = "<config>"):
        local = source
        if line is not None:
            local += f":{line}"
        if section is not None:
            local += f" [{section}]" + (f" {key}" if key else "")
        super().__init__(f"{local}: {mensagem}")
        self.section = section
        self.key = key
        self.line = line


@dataclass(frozen=True)
class ModelBlock:
    n_agents: int = PI_CONFIG['n_agents']
    dim: int = PI_CONFIG['dim']
    coupling: float = PI_CONFIG['coupling']
    control_strength: float = PI_CONFIG['control_strength']
    noise_strength: float = PI_CONFIG['noise_strength']
    g_psi: str = PI_CONFIG['g_psi']
    g_phi: str = PI_CONFIG['g_phi']
    g_b: str = PI_CONFIG['g_b']
    psi: str = PI_CONFIG['psi']
    phi: str = PI_CONFIG['phi']
    targets: str = PI_CONFIG['targets']


@dataclass(frozen=True)
class StepperBlock:
    dt: float = DEFAULT_DT
    t_end: float = DEFAULT_T_FINAL
    sample_times: Tuple[float, ...] = ()
    sample_stride: float = DEFAULT_PASSO_AMOSTRA
    seed: int = DEFAULT_SEED
    scheme: str = DEFAULT_ESQUEMA


@dataclass(frozen=True)
class EnsembleBlock:
    n_realizations: int = DEFAULT_REALIZACOES
    position_box: float = DEFAULT_CAIXA_POSICAO
    velocity_box: float = DEFAULT_CAIXA_VELOCIDADE
    shift_positions: bool = True
    shift_velocities: bool = True
    same_initial: bool = True
    n_workers: int = 1
    snapshot_times: Tuple[float, ...] = ()
    snapshot_all: bool = False


@dataclass(frozen=True)
class AnalysisBlock:
    convention: str = DEFAULT_CONVENCAO
    beta_override: Optional[float] = None
    margin: float = DEFAULT_MARGEM_BETA
    flocking_tol: float = 1e-2
    pattern_tol: float = 1e-2


@dataclass(frozen=True)
class OutputBlock:
    directory: str = OUTPUT_DIR
    formats: Tuple[str, ...] = ('csv', 'json')


_BLOCOS = {
    'model': ModelBlock,
    'stepper': StepperBlock,
    'ensemble': EnsembleBlock,
    'analysis': AnalysisBlock,
    'output': OutputBlock,
}

# Tipo declarado de cada chave
_TIPOS: Dict[str, Dict[str, str]] = {
    'model': {'n_agents': 'int', 'dim': 'int', 'coupling': 'float', 'control_strength': 'float',
              'noise_strength': 'float', 'g_psi': 'str', 'g_phi': 'str', 'g_b': 'str',
              'psi': 'str', 'phi': 'str', 'targets': 'str'},
    'stepper': {'dt': 'float', 't_end': 'float', 'sample_times': 'floats', 'sample_stride': 'float',
                'seed': 'int', 'scheme': 'str'},
    'ensemble': {'n_realizations': 'int', 'position_box': 'float', 'velocity_box': 'float',
                 'shift_positions': 'bool', 'shift_velocities': 'bool', 'same_initial': 'bool',
                 'n_workers': 'int', 'snapshot_times': 'floats', 'snapshot_all': 'bool'},
    'analysis': {'convention': 'str', 'beta_override': 'optfloat', 'margin': 'float',
                 'flocking_tol': 'float', 'pattern_tol': 'float'},
    'output': {'directory': 'str', 'formats': 'strs'},
}

_SECAO = re.compile(r"^\s*\[([^\]]+)\]")
_CHAVE = re.compile(r"^\s*([^\s=:#;\[][^=:]*?)\s*[=:]")


@dataclass(frozen=True)
class RunConfig:
    """Configuração completa e resolvida de uma execução"""

    model: ModelBlock = field(default_factory=ModelBlock)
    stepper: StepperBlock = field(default_factory=StepperBlock)
    ensemble: EnsembleBlock = field(default_factory=EnsembleBlock)
    analysis: AnalysisBlock = field(default_factory=AnalysisBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    base_dir: Optional[Path] = field(default=None, compare=False)

    # Leitura e escrita

    @classmethod
    def from_text(cls, texto: str, source: str = "<config>", base_dir: Optional[Path] = None) -> "RunConfig":
        """
        Interpreta o texto INI

        Raises:
            ConfigError: sintaxe, seção ou chave desconhecida, valor inválido
        """
        linhas = _mapear_linhas(texto)
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
        try:
            parser.read_string(texto, source=source)
        except configparser.MissingSectionHeaderError as e:
            raise ConfigError("conteúdo antes do primeiro cabeçalho de seção", line=e.lineno, source=source) from e
        except configparser.DuplicateSectionError as e:
            raise ConfigError(f"seção duplicada '{e.section}'", line=e.lineno, source=source) from e
        except configparser.DuplicateOptionError as e:
            raise ConfigError("chave duplicada", section=e.section, key=e.option,
                              line=e.lineno, source=source) from e
        except configparser.ParsingError as e:
            linha = e.errors[0][0] if e.errors else None
            raise ConfigError("linha ilegível", line=linha, source=source) from e

        blocos = {}
        for secao in parser.sections():
            if secao not in _BLOCOS:
                raise ConfigError(f"seção desconhecida (válidas: {list(_BLOCOS)})",
                                  section=secao, line=linhas.get((secao, None)), source=source)
        for secao, classe in _BLOCOS.items():
            valores = {}
            if parser.has_section(secao):
                for chave in parser.options(secao):
                    linha = linhas.get((secao, chave))
                    if chave not in _TIPOS[secao]:
                        raise ConfigError(f"chave desconhecida (válidas: {list(_TIPOS[secao])})",
                                          section=secao, key=chave, line=linha, source=source)
                    try:
                        valores[chave] = _converter(parser, secao, chave, _TIPOS[secao][chave])
                    except ValueError as e:
                        raise ConfigError(f"valor inválido: {e}", section=secao, key=chave,
                                          line=linha, source=source) from e
            blocos[secao] = classe(**valores)

        cfg = cls(**blocos, base_dir=base_dir)
        cfg._validar(linhas, source)
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        caminho = Path(path)
        if not caminho.exists():
            raise ConfigError(f"arquivo de configuração não encontrado: {caminho}")
        texto = caminho.read_text(encoding='utf-8')
        logger.info(f"📋 Configuração lida de {caminho}")
        return cls.from_text(texto, source=str(caminho), base_dir=caminho.parent)

    def to_text(self) -> str:
        """Serializa todas as chaves, na ordem declarada"""
        partes = []
        for secao in _BLOCOS:
            bloco = getattr(self, secao)
            partes.append(f"[{secao}]")
            for campo in fields(bloco):
                tipo = _TIPOS[secao][campo.name]
                partes.append(f"{campo.name} = {_formatar(getattr(bloco, campo.name), tipo)}")
            partes.append("")
        return "\n".join(partes)

    def to_dict(self) -> dict:
        return {secao: {campo.name: getattr(getattr(self, secao), campo.name)
                        for campo in fields(getattr(self, secao))}
                for secao in _BLOCOS}

    def with_overrides(self, seed: Optional[int] = None, convention: Optional[str] = None,
                       directory: Optional[str] = None) -> "RunConfig":
        """Aplica os overrides da linha de comando"""
        cfg = self
        if seed is not None:
            cfg = replace(cfg, stepper=replace(cfg.stepper, seed=int(seed)))
        if convention is not None:
            if convention not in CONVENCOES_COMPLEMENTO:
                raise ConfigError(f"convenção inválida '{convention}'", section='analysis', key='convention')
            cfg = replace(cfg, analysis=replace(cfg.analysis, convention=convention))
        if directory is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=str(directory)))
        return cfg

    # Validação

    def _validar(self, linhas: dict, source: str):
        def erro(secao, chave, mensagem):
            return ConfigError(mensagem, section=secao, key=chave,
                               line=linhas.get((secao, chave)), source=source)

        m, s, e, a, o = self.model, self.stepper, self.ensemble, self.analysis, self.output
        if m.n_agents < 1:
            raise erro('model', 'n_agents', "N deve ser >= 1")
        if m.dim < 1:
            raise erro('model', 'dim', "d deve ser >= 1")
        for chave in ('coupling', 'control_strength', 'noise_strength'):
            valor = getattr(m, chave)
            if not math.isfinite(valor) or valor < 0:
                raise erro('model', chave, f"deve ser finito e >= 0 (recebido {valor})")
        for chave in ('psi', 'phi'):
            try:
                parse_kernel(getattr(m, chave))
            except KernelError as ex:
                raise erro('model', chave, str(ex)) from ex
        for chave in ('g_psi', 'g_phi', 'g_b'):
            espec = getattr(m, chave)
            if espec not in FAMILIAS_GRAFO and not self._resolver_caminho(espec).exists():
                raise erro('model', chave, f"arquivo de arestas não encontrado: {espec}")
        if builtin_pattern(m.targets) is None and not self._resolver_caminho(m.targets).exists():
            raise erro('model', 'targets', f"arquivo de alvos não encontrado: {m.targets}")

        if not (math.isfinite(s.dt) and s.dt > 0):
            raise erro('stepper', 'dt', "dt deve ser positivo")
        if s.t_end < 0:
            raise erro('stepper', 't_end', "t_end deve ser >= 0")
        if not s.sample_times and s.sample_stride <= 0:
            raise erro('stepper', 'sample_stride', "sample_stride deve ser positivo")
        if any(b <= a for a, b in zip(s.sample_times, s.sample_times[1:])):
            raise erro('stepper', 'sample_times', "instantes devem ser estritamente crescentes")
        if s.sample_times and (s.sample_times[0] < 0 or s.sample_times[-1] > s.t_end + TOLERANCIA_GRADE):
            raise erro('stepper', 'sample_times', f"instantes fora de [0, {s.t_end}]")
        if not (0 <= s.seed < 2 ** 64):
            raise erro('stepper', 'seed', "semente fora de [0, 2^64)")
        if s.scheme not in ESQUEMAS:
            raise erro('stepper', 'scheme', f"esquema inválido (válidos: {ESQUEMAS})")

        if e.n_realizations < 1:
            raise erro('ensemble', 'n_realizations', "R deve ser >= 1")
        if e.position_box < 0 or e.velocity_box < 0:
            raise erro('ensemble', 'position_box' if e.position_box < 0 else 'velocity_box',
                       "caixas devem ser >= 0")
        if e.n_workers < 1:
            raise erro('ensemble', 'n_workers', "n_workers deve ser >= 1")
        if any(t < 0 or t > s.t_end + TOLERANCIA_GRADE for t in e.snapshot_times):
            raise erro('ensemble', 'snapshot_times', f"instantes fora de [0, {s.t_end}]")

        if a.convention not in CONVENCOES_COMPLEMENTO:
            raise erro('analysis', 'convention', f"convenção inválida (válidas: {CONVENCOES_COMPLEMENTO})")
        if a.beta_override is not None and not a.beta_override > 0:
            raise erro('analysis', 'beta_override', "beta deve ser positivo")
        if a.margin < 0:
            raise erro('analysis', 'margin', "margem deve ser >= 0")

        invalidos = [f for f in o.formats if f not in FORMATOS_SAIDA]
        if invalidos:
            raise erro('output', 'formats', f"formatos inválidos {invalidos} (válidos: {FORMATOS_SAIDA})")

    def _resolver_caminho(self, espec: str) -> Path:
        caminho = Path(espec[len('file:'):] if espec.startswith('file:') else espec)
        if self.base_dir is not None and not caminho.is_absolute():
            caminho = self.base_dir / caminho
        return caminho

    # Objetos do domínio

    def build_params(self) -> ModelParams:
        """
        Resolve grafos, núcleos e alvos e monta os parâmetros do modelo

        Raises:
            ConfigError: alvos com dimensões incompatíveis ou grafo inválido
        """
        m = self.model
        grafos = {}
        for chave in ('g_psi', 'g_phi', 'g_b'):
            espec = getattr(m, chave)
            alvo = espec if espec in FAMILIAS_GRAFO else str(self._resolver_caminho(espec))
            try:
                grafos[chave] = resolve_graph(alvo, m.n_agents)
            except GraphError as e:
                raise ConfigError(str(e), section='model', key=chave) from e
        try:
            alvos = resolve_targets(m.targets, m.n_agents, m.dim, self.base_dir)
        except PatternError as e:
            raise ConfigError(str(e), section='model', key='targets') from e
        try:
            return ModelParams(
                n_agents=m.n_agents, dim=m.dim, coupling=m.coupling,
                control_strength=m.control_strength, noise_strength=m.noise_strength,
                psi=parse_kernel(m.psi), phi=parse_kernel(m.phi), targets=alvos, **grafos,
            )
        except (ModelError, GraphError) as e:
            raise ConfigError(str(e), section='model') from e

    def resolved_sample_times(self) -> Tuple[float, ...]:
        """Instantes explícitos, ou a grade 0, stride, 2 stride, ... até t_end"""
        s = self.stepper
        if s.sample_times:
            return s.sample_times
        n = int(math.floor(s.t_end / s.sample_stride + TOLERANCIA_GRADE))
        tempos = [k * s.sample_stride for k in range(n + 1)]
        if s.t_end - tempos[-1] > TOLERANCIA_GRADE * max(1.0, s.t_end):
            tempos.append(s.t_end)
        return tuple(tempos)

    def stepper_config(self) -> StepperConfig:
        return StepperConfig(dt=self.stepper.dt, seed=self.stepper.seed, scheme=self.stepper.scheme)

    def ensemble_config(self) -> EnsembleConfig:
        e = self.ensemble
        return EnsembleConfig(
            n_realizations=e.n_realizations,
            sample_times=self.resolved_sample_times(),
            seed=self.stepper.seed,
            position_box=e.position_box,
            velocity_box=e.velocity_box,
            shift_positions=e.shift_positions,
            shift_velocities=e.shift_velocities,
            same_initial=e.same_initial,
            snapshot_times=e.snapshot_times,
            snapshot_all=e.snapshot_all,
            n_workers=e.n_workers,
        )


def _mapear_linhas(texto: str) -> Dict[tuple, int]:
    """(seção, chave) -> número da linha; (seção, None) -> linha do cabeçalho"""
    linhas = {}
    secao = None
    for numero, linha in enumerate(texto.splitlines(), start=1):
        casamento = _SECAO.match(linha)
        if casamento:
            secao = casamento.group(1).strip()
            linhas.setdefault((secao, None), numero)
            continue
        casamento = _CHAVE.match(linha)
        if casamento and secao is not None:
            linhas.setdefault((secao, casamento.group(1).strip().lower()), numero)
    return linhas


def _converter(parser: configparser.ConfigParser, secao: str, chave: str, tipo: str):
    bruto = parser.get(secao, chave).strip()
    if tipo == 'int':
        return int(bruto)
    if tipo == 'float':
        return float(bruto)
    if tipo == 'bool':
        return parser.getboolean(secao, chave)
    if tipo == 'optfloat':
        return None if bruto.lower() in ('', 'none') else float(bruto)
    if tipo == 'floats':
        return tuple(float(x) for x in bruto.split(',') if x.strip())
    if tipo == 'strs':
        return tuple(x.strip() for x in bruto.split(',') if x.strip())
    if not bruto:
        raise ValueError("valor vazio")
    return bruto


def _formatar(valor, tipo: str) -> str:
    if tipo == 'float':
        return repr(float(valor))
    if tipo == 'bool':
        return 'true' if valor else 'false'
    if tipo == 'optfloat':
        return 'none' if valor is None else repr(float(valor))
    if tipo == 'floats':
        return ', '.join(repr(float(x)) for x in valor)
    if tipo == 'strs':
        return ', '.join(valor)
    return str(valor)

