"""
Run configuration: key = value files, JSON overrides and FLATLAB_SEED
"""
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from ..config import OUTPUT_DIR, SEED_ENV_VAR, SUITE_CONFIG, TOLERANCES
from ..errors import ParameterError, SchemaError, ValidationError
from ..filling.budget import ProfileParams


@dataclass(frozen=True)
class RunConfig:
    """Everything a verify run needs"""
    m: int = SUITE_CONFIG['m']
    schedule: Tuple[float, ...] = tuple(SUITE_CONFIG['schedule'])
    seeds: Tuple[int, ...] = tuple(SUITE_CONFIG['seeds'])
    sample_size: int = SUITE_CONFIG['sample_size']
    near_size: int = SUITE_CONFIG['near_diagonal_size']
    gh_points: int = SUITE_CONFIG['gh_points']
    workers: int = SUITE_CONFIG['workers']
    profile_params: ProfileParams = field(default_factory=ProfileParams)
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(TOLERANCES))
    output_dir: Path = OUTPUT_DIR

    def __post_init__(self):
        if self.m < 2:
            raise ParameterError(f"m must be at least 2, got {self.m}")
        if not self.schedule:
            raise ParameterError("schedule must not be empty")
        if any(b >= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ParameterError(f"schedule must be strictly decreasing, got {list(self.schedule)}")
        if not self.seeds:
            raise ParameterError("seeds must not be empty")
        if self.sample_size < 1:
            raise ParameterError(f"sample_size must be at least 1, got {self.sample_size}")
        if self.workers < 1:
            raise ParameterError(f"workers must be at least 1, got {self.workers}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'schedule': list(self.schedule),
            'seeds': list(self.seeds),
            'sample_size': self.sample_size,
            'near_size': self.near_size,
            'gh_points': self.gh_points,
            'workers': self.workers,
            'rho0_factor': self.profile_params.rho0_factor,
            'L_policy': self.profile_params.L_policy,
            'tolerances': dict(self.tolerances),
        }


def _float_list(text: str) -> List[float]:
    return [float(v) for v in str(text).split(',') if v.strip()]


def _int_list(text: str) -> List[int]:
    return [int(v) for v in str(text).split(',') if v.strip()]


# key -> parser for values read as text
_PARSERS: Dict[str, Callable[[str], Any]] = {
    'm': int,
    'schedule': _float_list,
    'seeds': _int_list,
    'sample_size': int,
    'near_size': int,
    'gh_points': int,
    'workers': int,
    'rho0_factor': float,
    'L_policy': str,
    'output_dir': str,
}


def parse_config_text(text: str) -> Dict[str, Any]:
    """
    Parse a flat key = value file

    Blank lines and # comments are ignored; lists are comma-separated;
    tolerance.<name> = value sets one tolerance.
    """
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise SchemaError(f"line {number}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        try:
            if key.startswith('tolerance.'):
                name = key.split('.', 1)[1]
                if name not in TOLERANCES:
                    raise SchemaError(f"line {number}: unknown tolerance {name!r}")
                values.setdefault('tolerances', {})[name] = float(value)
            elif key in _PARSERS:
                values[key] = _PARSERS[key](value)
            else:
                raise SchemaError(f"line {number}: unknown key {key!r}")
        except ValueError as exc:
            raise SchemaError(f"line {number}: bad value for {key!r}: {exc}") from exc
    return values


def _coerce(values: Mapping[str, Any]) -> Dict[str, Any]:
    """Bring JSON override values to the types parse_config_text produces"""
    out: Dict[str, Any] = {}
    for key, value in values.items():
        if key == 'tolerances':
            if not isinstance(value, dict) or any(k not in TOLERANCES for k in value):
                raise SchemaError(f"bad tolerances override: {value!r}")
            out[key] = {k: float(v) for k, v in value.items()}
        elif key not in _PARSERS:
            raise ValidationError(f"unknown override key {key!r}")
        elif key in ('schedule', 'seeds') and isinstance(value, list):
            out[key] = [float(v) for v in value] if key == 'schedule' else [int(v) for v in value]
        else:
            out[key] = _PARSERS[key](value)
    return out


def load_run_config(
    path: Optional[Path] = None,
    override: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    File values, then the JSON override, then FLATLAB_SEED

    Args:
        path: key = value file (optional)
        override: JSON object text merged on top
        environ: environment mapping (default: os.environ)
    """
    environ = os.environ if environ is None else environ
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"config file not found: {path}")
        values.update(parse_config_text(path.read_text(encoding='utf-8')))
    if override:
        try:
            extra = json.loads(override)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"--override is not valid JSON: {exc}") from exc
        if not isinstance(extra, dict):
            raise ValidationError("--override must be a JSON object")
        extra = _coerce(extra)
        if 'tolerances' in extra:
            values.setdefault('tolerances', {}).update(extra.pop('tolerances'))
        values.update(extra)
    seed_text = environ.get(SEED_ENV_VAR)
    if seed_text:
        try:
            values['seeds'] = _int_list(seed_text)
        except ValueError as exc:
            raise ValidationError(f"{SEED_ENV_VAR} must be comma-separated integers") from exc

    config = RunConfig()
    params = {}
    for key in ('rho0_factor', 'L_policy'):
        if key in values:
            params[key] = values.pop(key)
    if params:
        config = replace(config, profile_params=ProfileParams(**{
            'rho0_factor': config.profile_params.rho0_factor,
            'L_policy': config.profile_params.L_policy,
            **params,
        }))
    if 'tolerances' in values:
        values['tolerances'] = {**TOLERANCES, **values['tolerances']}
    if 'output_dir' in values:
        values['output_dir'] = Path(values['output_dir'])
    for key in ('schedule', 'seeds'):
        if key in values:
            values[key] = tuple(values[key])
    return replace(config, **values)
