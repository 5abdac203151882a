"""Experiment specification and its ``key = value`` config format.

Example::

    # chain graph, three seeds
    kind = chain
    p = 100
    seeds = 1, 2, 3
    methods = sice-edat, gista
    lambda = 0.22

Blank lines and ``#`` comments are ignored. Unknown keys are errors.
"""
from dataclasses import dataclass, field, replace

from . import defaults
from .baseline import BaselineConfig
from .estimator import EstimatorConfig

__all__ = ["ParseError", "ExperimentSpec", "parse_config", "load_config",
           "METHODS"]

METHODS = ("sice-edat", "gista")


class ParseError(ValueError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str = "chain"
    p: int = 100
    n: int | None = None
    target_nnz: int | None = None
    seeds: tuple = (0,)
    methods: tuple = ("sice-edat",)
    estimator_cfg: EstimatorConfig = field(default_factory=EstimatorConfig)
    baseline_cfg: BaselineConfig | None = None
    output_path: str = "out"
    center: bool = False
    zero_tol: float = 0.0
    # lambda calibration: pick each method's lambda on separate seeds
    calibrate_fpr: float | None = None
    calibration_seeds: tuple = ()
    lambda_grid: tuple = ()

    def __post_init__(self):
        if self.kind not in ("chain", "random"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.n is None:
            object.__setattr__(self, "n", max(self.p // 2, 1))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "random" and self.target_nnz is None:
            object.__setattr__(self, "target_nnz", defaults.NNZ_PER_DIM * self.p)
        if self.baseline_cfg is None and "gista" in self.methods:
            object.__setattr__(self, "baseline_cfg", BaselineConfig())
        if self.calibrate_fpr is not None and not (
                self.calibration_seeds and self.lambda_grid):
            raise ValueError("calibration needs calibration_seeds and lambda_grid")

    def as_dict(self):
        from dataclasses import asdict
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["methods"] = list(self.methods)
        d["calibration_seeds"] = list(self.calibration_seeds)
        d["lambda_grid"] = list(self.lambda_grid)
        return d


def _int(v):
    return int(v)


def _pos_int(v):
    x = int(v)
    if x < 1:
        raise ValueError("must be a positive integer")
    return x


def _float(v):
    return float(v)


def _opt_float(v):
    return None if v.lower() in ("none", "auto", "") else float(v)


def _bool(v):
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _ints(v):
    out = tuple(int(x) for x in v.replace(",", " ").split())
    if not out:
        raise ValueError("expected at least one integer")
    if any(not 0 <= x < 2**64 for x in out):
        raise ValueError("seeds must be 64-bit unsigned integers")
    return out


def _floats(v):
    return tuple(float(x) for x in v.replace(",", " ").split())


def _methods(v):
    return tuple(x.strip() for x in v.split(",") if x.strip())


# key -> (target, field, converter); target is spec, est or base
_KEYS = {
    "kind": ("spec", "kind", str.lower),
    "p": ("spec", "p", _int),
    "n": ("spec", "n", _pos_int),
    "target_nnz": ("spec", "target_nnz", _pos_int),
    "seeds": ("spec", "seeds", _ints),
    "methods": ("spec", "methods", _methods),
    "output_path": ("spec", "output_path", str),
    "center": ("spec", "center", _bool),
    "zero_tol": ("spec", "zero_tol", _float),
    "calibrate_fpr": ("spec", "calibrate_fpr", _opt_float),
    "calibration_seeds": ("spec", "calibration_seeds", _ints),
    "lambda_grid": ("spec", "lambda_grid", _floats),
    "lambda": ("est", "lam", _float),
    "thr0": ("est", "thr0", _opt_float),
    "decay": ("est", "decay", _float),
    "rho0": ("est", "rho0", _opt_float),
    "rho_growth": ("est", "rho_growth", _opt_float),
    "max_iters": ("est", "max_iters", _pos_int),
    "rel_tol": ("est", "rel_tol", _float),
    "skip_diagonal": ("est", "skip_diagonal", _bool),
    "jitter_base": ("est", "jitter_base", _float),
    "baseline_lambda": ("base", "lam", _float),
    "baseline_step0": ("base", "step0", _float),
    "baseline_backtrack": ("base", "backtrack", _float),
    "baseline_max_iters": ("base", "max_iters", _pos_int),
    "baseline_obj_tol": ("base", "obj_tol", _float),
    "baseline_penalize_diagonal": ("base", "penalize_diagonal", _bool),
}


def parse_config(text):
    """Parse ``key = value`` lines into an :class:`ExperimentSpec`.

    Raises
    ------
    ParseError
        On syntax errors, unknown or repeated keys, and invalid values.
    """
    fields = {"spec": {}, "est": {}, "base": {}}
    where = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in where:
            raise ParseError(lineno, f"key {key!r} repeated")
        target, name, conv = _KEYS[key]
        try:
            fields[target][name] = conv(value)
        except ValueError as exc:
            raise ParseError(lineno, f"{key}: {exc}") from None
        where[key] = lineno

    def build(cls, kw, prefix):
        try:
            return cls(**kw)
        except ValueError as exc:
            lines = [where[k] for k in where if _KEYS[k][0] == prefix]
            raise ParseError(min(lines) if lines else 0, str(exc)) from None

    est = build(EstimatorConfig, fields["est"], "est")
    base = build(BaselineConfig, fields["base"], "base") if fields["base"] else None
    spec_kw = dict(fields["spec"], estimator_cfg=est, baseline_cfg=base)
    return build(ExperimentSpec, spec_kw, "spec")


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def with_estimator(spec, **overrides):
    """Copy of ``spec`` with non-None estimator overrides applied."""
    kw = {k: v for k, v in overrides.items() if v is not None}
    if not kw:
        return spec
    return replace(spec, estimator_cfg=replace(spec.estimator_cfg, **kw))
