"""Declarative experiment configuration: one YAML tree per run.

Every key is explicit and every unknown key is an error, so a typo
cannot silently change an experiment.  ``parse_config(emit_config(c))``
returns a config equal to ``c``: emission writes the fully resolved
tree (defaults filled in), and floats are written with round-tripping
precision.
"""

from dataclasses import dataclass, fields

import yaml

from .errors import ConfigError

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "emit_config",
    "validate_config",
    "F_CATALOG",
    "G_CATALOG",
    "KERNEL_KINDS",
    "COEFF_NAMES",
]

KERNEL_KINDS = ("axes", "isotropic", "modulated")
COEFF_NAMES = ("constant", "checkerboard", "bump", "onesided")
# data sources; "constant" takes a value suffix, e.g. "constant:0.5"
F_CATALOG = ("zero", "constant", "bump")
G_CATALOG = ("zero", "constant", "gaussian", "axis-bump", "half-line")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alpha: tuple
    kernel_kind: str = "axes"
    kernel_coeff: str = "constant"
    nodes: tuple = (65,)
    radius: float = 2.0
    pad: int = 8
    center: tuple = (0.0,)
    r: float = 0.5
    lam: float = 2.0
    theta: float = 8.0
    sigma: float = 1.25
    f_name: str = "zero"
    g_name: str = "gaussian"
    paths: int = 100_000
    dt: float = 1e-3
    horizon: float = 50.0
    seed: int = 0
    solver_tol: float = 1e-10
    q: float = None
    output: str = ""

    @property
    def d(self):
        return len(self.alpha)

    @property
    def beta(self):
        return float(sum(1.0 / a for a in self.alpha))

    def with_overrides(self, seed=None, output=None):
        from dataclasses import replace
        kw = {}
        if seed is not None:
            kw["seed"] = int(seed)
        if output is not None:
            kw["output"] = str(output)
        return replace(self, **kw) if kw else self


def _err(path, msg):
    raise ConfigError("%s: %s" % (path, msg))


def _as_float(x, path):
    if isinstance(x, bool) or isinstance(x, (list, dict)):
        _err(path, "expected a number, got %r" % (x,))
    try:
        return float(x)
    except (TypeError, ValueError):
        _err(path, "expected a number, got %r" % (x,))


def _as_int(x, path):
    if isinstance(x, bool):
        _err(path, "expected an integer, got %r" % (x,))
    if isinstance(x, int):
        return x
    if isinstance(x, float) and x == int(x):
        return int(x)
    if isinstance(x, str):
        try:
            return int(x, 0)
        except ValueError:
            pass
    _err(path, "expected an integer, got %r" % (x,))


def _as_str(x, path):
    if not isinstance(x, str):
        _err(path, "expected a string, got %r" % (x,))
    return x


def _section(tree, name, known):
    sub = tree.pop(name, None)
    if sub is None:
        return {}
    if not isinstance(sub, dict):
        _err(name, "expected a mapping")
    for key in sub:
        if key not in known:
            _err("%s.%s" % (name, key),
                 "unknown key (known: %s)" % ", ".join(known))
    return sub


def _float_list(x, path, length=None):
    if not isinstance(x, (list, tuple)):
        _err(path, "expected a list of numbers")
    vals = tuple(_as_float(v, "%s[%d]" % (path, i)) for i, v in enumerate(x))
    if length is not None and len(vals) != length:
        _err(path, "expected %d entries, got %d" % (length, len(vals)))
    return vals


def _data_name(x, path, catalog):
    name = _as_str(x, path)
    base, _, arg = name.partition(":")
    if base not in catalog:
        _err(path, "unknown catalog item %r (catalog: %s)"
             % (base, ", ".join(catalog)))
    if base == "constant":
        if not arg:
            _err(path, "constant needs a value, e.g. constant:0.5")
        _as_float(arg, path)
    elif arg:
        _err(path, "%r does not take a value" % base)
    return name


def data_value(name):
    """Numeric suffix of a 'constant:<v>' catalog name, else None."""
    base, _, arg = name.partition(":")
    return float(arg) if base == "constant" else None


def parse_config(text):
    """Parse + validate a YAML config; ConfigError carries the field path."""
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = " at line %d" % (mark.line + 1) if mark else ""
        raise ConfigError("not valid YAML%s: %s" % (where, exc))
    if not isinstance(tree, dict):
        raise ConfigError("top level must be a mapping of sections")
    tree = dict(tree)

    top_known = ("experiment", "alpha", "kernel", "grid", "domain", "data",
                 "mc", "seed", "tolerances", "output")
    for key in tree:
        if key not in top_known:
            _err(key, "unknown key (known: %s)" % ", ".join(top_known))

    if "experiment" not in tree:
        _err("experiment", "required key is missing")
    experiment = _as_str(tree.pop("experiment"), "experiment")
    if "alpha" not in tree:
        _err("alpha", "required key is missing")
    alpha = _float_list(tree.pop("alpha"), "alpha")
    d = len(alpha)

    kernel = _section(tree, "kernel", ("kind", "coeff"))
    grid = _section(tree, "grid", ("nodes", "radius", "pad"))
    domain = _section(tree, "domain",
                      ("center", "r", "lam", "theta", "sigma"))
    data = _section(tree, "data", ("f", "g"))
    mc = _section(tree, "mc", ("paths", "dt", "horizon"))
    tol = _section(tree, "tolerances", ("solver", "q"))

    kind = _as_str(kernel.get("kind", "axes"), "kernel.kind")
    if kind not in KERNEL_KINDS:
        _err("kernel.kind", "unknown kind %r (known: %s)"
             % (kind, ", ".join(KERNEL_KINDS)))
    coeff = _as_str(kernel.get("coeff", "constant"), "kernel.coeff")
    if coeff not in COEFF_NAMES:
        _err("kernel.coeff", "unknown coefficient %r (known: %s)"
             % (coeff, ", ".join(COEFF_NAMES)))

    nodes = grid.get("nodes", 65)
    if isinstance(nodes, (list, tuple)):
        nodes = tuple(_as_int(v, "grid.nodes[%d]" % i)
                      for i, v in enumerate(nodes))
        if len(nodes) != d:
            _err("grid.nodes", "expected %d entries, got %d" % (d, len(nodes)))
    else:
        nodes = (_as_int(nodes, "grid.nodes"),) * d

    center = domain.get("center")
    center = ((0.0,) * d if center is None
              else _float_list(center, "domain.center", d))

    q = tol.get("q")
    cfg = ExperimentConfig(
        experiment=experiment,
        alpha=alpha,
        kernel_kind=kind,
        kernel_coeff=coeff,
        nodes=nodes,
        radius=_as_float(grid.get("radius", 2.0), "grid.radius"),
        pad=_as_int(grid.get("pad", 8), "grid.pad"),
        center=center,
        r=_as_float(domain.get("r", 0.5), "domain.r"),
        lam=_as_float(domain.get("lam", 2.0), "domain.lam"),
        theta=_as_float(domain.get("theta", 8.0), "domain.theta"),
        sigma=_as_float(domain.get("sigma", 1.25), "domain.sigma"),
        f_name=_data_name(data.get("f", "zero"), "data.f", F_CATALOG),
        g_name=_data_name(data.get("g", "gaussian"), "data.g", G_CATALOG),
        paths=_as_int(mc.get("paths", 100_000), "mc.paths"),
        dt=_as_float(mc.get("dt", 1e-3), "mc.dt"),
        horizon=_as_float(mc.get("horizon", 50.0), "mc.horizon"),
        seed=_as_int(tree.pop("seed", 0), "seed"),
        solver_tol=_as_float(tol.get("solver", 1e-10), "tolerances.solver"),
        q=None if q is None else _as_float(q, "tolerances.q"),
        output=_as_str(tree.pop("output", ""), "output") or
               ("runs/" + experiment),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    """Semantic checks shared by parse and the CLI validate command."""
    d = cfg.d
    if d == 0:
        _err("alpha", "needs at least one entry")
    for i, a in enumerate(cfg.alpha):
        if not 0.0 < a < 2.0:
            _err("alpha[%d]" % i, "index must lie in (0, 2), got %r" % (a,))
    for i, n in enumerate(cfg.nodes):
        if n < 3:
            _err("grid.nodes[%d]" % i, "needs at least 3 nodes per axis")
    if cfg.radius <= 0.0:
        _err("grid.radius", "must be positive")
    if cfg.pad < 0:
        _err("grid.pad", "must be nonnegative")
    if cfg.r <= 0.0:
        _err("domain.r", "must be positive")
    for name in ("lam", "theta", "sigma"):
        if getattr(cfg, name) <= 1.0:
            _err("domain." + name, "must exceed 1")
    if cfg.paths < 1:
        _err("mc.paths", "needs at least one path")
    if cfg.dt <= 0.0:
        _err("mc.dt", "must be positive")
    if cfg.horizon <= cfg.dt:
        _err("mc.horizon", "must exceed the step size")
    if not 0 <= cfg.seed < 2 ** 64:
        _err("seed", "must fit in an unsigned 64-bit integer")
    if cfg.solver_tol <= 0.0:
        _err("tolerances.solver", "must be positive")
    fval = data_value(cfg.f_name)
    f_nonzero = cfg.f_name.partition(":")[0] != "zero" and fval != 0.0
    if cfg.q is not None:
        if cfg.q <= 1.0:
            _err("tolerances.q", "must exceed 1")
        if f_nonzero and cfg.q <= max(2.0, cfg.beta):
            _err("tolerances.q",
                 "needs q > max(2, %.6g) when the source is nonzero, got %.6g"
                 % (cfg.beta, cfg.q))
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc))
    return parse_config(text)


def emit_config(cfg: ExperimentConfig):
    """Canonical YAML for a config; parse_config inverts this exactly."""
    doc = {
        "experiment": cfg.experiment,
        "alpha": list(cfg.alpha),
        "kernel": {"kind": cfg.kernel_kind, "coeff": cfg.kernel_coeff},
        "grid": {"nodes": list(cfg.nodes), "radius": cfg.radius,
                 "pad": cfg.pad},
        "domain": {"center": list(cfg.center), "r": cfg.r, "lam": cfg.lam,
                   "theta": cfg.theta, "sigma": cfg.sigma},
        "data": {"f": cfg.f_name, "g": cfg.g_name},
        "mc": {"paths": cfg.paths, "dt": cfg.dt, "horizon": cfg.horizon},
        "seed": cfg.seed,
        "tolerances": {"solver": cfg.solver_tol,
                       **({"q": cfg.q} if cfg.q is not None else {})},
        "output": cfg.output,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)
