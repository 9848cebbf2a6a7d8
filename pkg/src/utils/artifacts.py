"""
Run artifacts: versioned JSON documents in a timestamped run directory

Floats are written with 17 significant digits so that every artifact
re-loads bit for bit.
"""
import json
import logging
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from ..config import FLOAT_DIGITS, OUTPUT_DIR, SCHEMAS, TOLERANCES
from ..convergence.lab import ConvergenceRecord, ConvergenceReport
from ..errors import SchemaError, ValidationError
from ..filling.budget import FillingBudget, IteratedBudget
from ..geometry.sphere import Net
from ..geometry.threads import EndpointSet, Thread, ThreadSystem, tunnel_radius
from ..tunnel.profile import TunnelProfile, generate_profile

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# JSON text with fixed float precision
# ---------------------------------------------------------------------------

def _format_float(x: float) -> str:
    if math.isnan(x):
        return 'NaN'
    if math.isinf(x):
        return 'Infinity' if x > 0 else '-Infinity'
    text = format(x, f'.{FLOAT_DIGITS}g')
    if not any(c in text for c in '.en'):
        text += '.0'
    return text


def _dump(obj: Any, indent: int = 0) -> str:
    pad = '  ' * (indent + 1)
    end = '  ' * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f'{pad}{json.dumps(str(k))}: {_dump(v, indent + 1)}' for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return '[' + ', '.join(_dump(v, indent + 1) for v in obj) + ']'
        items = [pad + _dump(v, indent + 1) for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Dict[str, Any]) -> str:
    return _dump(doc) + '\n'


def load_artifact(path: Path, schema: Optional[str] = None) -> Dict[str, Any]:
    """
    Read a JSON artifact and check its schema id

    Raises:
        ValidationError: the file does not exist
        SchemaError: not JSON, no schema field, or a different schema
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"artifact not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or 'schema' not in doc:
        raise SchemaError(f"{path} has no schema field")
    if schema is not None and doc['schema'] != schema:
        raise SchemaError(f"{path} has schema {doc['schema']!r}, expected {schema!r}")
    return doc


class ArtifactStore:
    """Owns one run directory output_dir/<YYYYmmdd-HHMMSS>/"""

    def __init__(self, output_dir: Optional[Path] = None, run_id: Optional[str] = None):
        """
        Args:
            output_dir: root for run directories (default: OUTPUT_DIR)
            run_id: directory name (default: current timestamp)
        """
        self.output_dir = Path(output_dir or OUTPUT_DIR)
        self.run_id = run_id or datetime.now().strftime('%Y%m%d-%H%M%S')
        self._run_dir: Optional[Path] = None

    @property
    def run_dir(self) -> Path:
        if self._run_dir is None:
            candidate = self.output_dir / self.run_id
            suffix = 1
            while candidate.exists():
                candidate = self.output_dir / f"{self.run_id}-{suffix}"
                suffix += 1
            candidate.mkdir(parents=True)
            self._run_dir = candidate
        return self._run_dir

    def path(self, name: str) -> Path:
        return self.run_dir / name

    def write(self, name: str, doc: Dict[str, Any]) -> Path:
        """Write a JSON document; its schema must be one of SCHEMAS"""
        if doc.get('schema') not in SCHEMAS.values():
            raise SchemaError(f"unknown artifact schema {doc.get('schema')!r}")
        doc = dict(doc)
        doc['created'] = datetime.now().isoformat()
        target = self.path(name)
        with open(target, 'w', encoding='utf-8') as f:
            f.write(dumps(doc))
        logger.debug(f"wrote {target}")
        return target


# ---------------------------------------------------------------------------
# codecs
# ---------------------------------------------------------------------------

def encode_net(net: Net) -> Dict[str, Any]:
    return {
        'schema': SCHEMAS['net'],
        'm': net.m,
        'eps': net.eps,
        'seed': net.seed,
        'count': net.count,
        'centers': net.centers,
    }


def decode_net(doc: Dict[str, Any]) -> Net:
    _expect(doc, 'net')
    try:
        net = Net(np.asarray(doc['centers'], dtype=float), float(doc['eps']), int(doc['seed']))
    except KeyError as exc:
        raise SchemaError(f"net artifact lacks {exc}") from exc
    if net.m != int(doc.get('m', net.m)) or net.count != int(doc.get('count', net.count)):
        raise SchemaError("net artifact header disagrees with its centers")
    return net


def encode_threads(system: ThreadSystem) -> Dict[str, Any]:
    es = system.endpoint_set
    if es is not None:
        endpoints = [[i, j, q] for (i, j), q in sorted(es.endpoints.items())]
    else:
        endpoints = []
        for t in system.threads:
            endpoints.append([t.i, t.j, t.start])
            endpoints.append([t.j, t.i, t.end])
    return {
        'schema': SCHEMAS['threads'],
        'm': system.m,
        'eps': system.eps,
        'rho': system.rho,
        'net': encode_net(es.net) if es is not None else None,
        'endpoints': endpoints,
        'pairs': [[t.i, t.j, t.length] for t in system.threads],
    }


def decode_threads(doc: Dict[str, Any]) -> ThreadSystem:
    _expect(doc, 'threads')
    try:
        points = {(int(i), int(j)): np.asarray(q, dtype=float) for i, j, q in doc['endpoints']}
        threads = []
        for i, j, length in doc['pairs']:
            i, j = int(i), int(j)
            start, end = points[(i, j)], points[(j, i)]
            chord = float(np.linalg.norm(start - end))
            if abs(chord - float(length)) > TOLERANCES['algebraic']:
                raise SchemaError(f"thread ({i}, {j}) length {length} is not its chord {chord}")
            threads.append(Thread(i, j, start, end, float(length)))
        net_doc = doc['net']
        eps, rho, m = float(doc['eps']), float(doc['rho']), int(doc['m'])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed threads artifact: {exc}") from exc
    endpoint_set = None
    if net_doc is not None:
        net = decode_net(net_doc)
        endpoint_set = EndpointSet(net, points)
        if abs(rho - tunnel_radius(net.eps, net.count)) > TOLERANCES['algebraic']:
            raise SchemaError("rho disagrees with eps / N^2")
    return ThreadSystem(tuple(threads), eps, rho, m, endpoint_set)


def encode_profile(profile: TunnelProfile) -> Dict[str, Any]:
    return {
        'schema': SCHEMAS['profile'],
        'm': profile.m,
        'rho0': profile.rho0,
        'rho': profile.rho,
        'L': profile.L,
        'L_prime': profile.L_prime,
        'neck_length': profile.neck_length,
        'min_length': profile.min_length,
        'samples': len(profile.s),
    }


def decode_profile(doc: Dict[str, Any]) -> TunnelProfile:
    """Regenerates the profile from its parameters and checks L'"""
    _expect(doc, 'profile')
    try:
        profile = generate_profile(
            int(doc['m']), float(doc['rho0']), float(doc['rho']), float(doc['L']),
            samples=int(doc['samples']),
        )
    except KeyError as exc:
        raise SchemaError(f"profile artifact lacks {exc}") from exc
    if abs(profile.L_prime - float(doc['L_prime'])) > TOLERANCES['algebraic'] * max(1.0, profile.L):
        raise SchemaError("stored L' does not match the regenerated profile")
    return profile


def encode_budget(budget) -> Dict[str, Any]:
    """budget/1 for an IteratedBudget or a single FillingBudget"""
    if isinstance(budget, FillingBudget):
        return {
            'schema': SCHEMAS['budget'],
            'mode': 'single',
            'eps': None,
            'K': 1,
            'per_step': [budget.to_dict()],
            'total_dF': budget.dF_bound,
            'total_dGH': budget.dGH_bound,
            'fitted_constants': {'pipe_constant': budget.pipe_constant},
        }
    if not isinstance(budget, IteratedBudget):
        raise ValidationError(f"not a budget: {type(budget).__name__}")
    return {
        'schema': SCHEMAS['budget'],
        'mode': 'iterated',
        'eps': budget.eps,
        'K': budget.K,
        'count': budget.count,
        'm': budget.m,
        'rho': budget.rho,
        'rho0': budget.rho0,
        'per_step': [b.to_dict() for b in budget.per_step],
        'host_volumes': list(budget.host_volumes),
        'total_dF': budget.total_dF,
        'total_dGH': budget.total_dGH,
        'fitted_constants': dict(budget.fitted_constants),
        'dF_per_eps': budget.dF_per_eps,
        'chained_bound': budget.chained_bound,
    }


def decode_budget(doc: Dict[str, Any]):
    _expect(doc, 'budget')
    try:
        steps = tuple(FillingBudget(**row) for row in doc['per_step'])
        if doc['mode'] == 'single':
            return steps[0]
        return IteratedBudget(
            m=int(doc['m']), eps=float(doc['eps']), count=int(doc['count']), K=int(doc['K']),
            rho=float(doc['rho']), rho0=float(doc['rho0']), per_step=steps,
            host_volumes=tuple(float(v) for v in doc['host_volumes']),
            total_dF=float(doc['total_dF']), total_dGH=float(doc['total_dGH']),
            fitted_constants={k: float(v) for k, v in doc['fitted_constants'].items()},
            dF_per_eps=float(doc['dF_per_eps']), chained_bound=float(doc['chained_bound']),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"malformed budget artifact: {exc}") from exc


def encode_report(report: ConvergenceReport, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    doc = {
        'schema': SCHEMAS['report'],
        'm': report.m,
        'schedule': list(report.schedule),
        'seeds': list(report.seeds),
        'sample_size': report.sample_size,
        'records': [r.to_dict() for r in report.per_eps],
    }
    doc.update(extra or {})
    return doc


def decode_report(doc: Dict[str, Any]) -> ConvergenceReport:
    _expect(doc, 'report')
    try:
        records = [ConvergenceRecord.from_dict(r) for r in doc['records']]
        return ConvergenceReport(
            int(doc['m']), [float(e) for e in doc['schedule']],
            [int(s) for s in doc['seeds']], int(doc['sample_size']), records,
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed report artifact: {exc}") from exc


def encode_query(x: np.ndarray, y: np.ndarray, values: Dict[str, float], K: int) -> Dict[str, Any]:
    doc = {'schema': SCHEMAS['query'], 'x': x, 'y': y, 'K': K}
    doc.update(values)
    return doc


def _expect(doc: Dict[str, Any], kind: str) -> None:
    if doc.get('schema') != SCHEMAS[kind]:
        raise SchemaError(f"expected schema {SCHEMAS[kind]!r}, got {doc.get('schema')!r}")
