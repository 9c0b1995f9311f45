# Scenario.py
# TOML scenario files and the embedded example scenarios.

import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging

from .GasBasics import (
    BoundaryMode,
    CriterionAdjustment,
    ExpressionSyntaxError,
    FVAdjustment,
    ODEAdjustment,
    ScenarioError,
)
from .GasState import GasParams
from .Profile import Profile, preset_profile, PROFILE_PRESETS
from .ProfileExpression import parse

logger = logging.getLogger(__name__)

SECTIONS: Dict[str, tuple] = {
    "gas": ("gamma",),
    "domain": ("a", "b", "nodes", "refine_fraction", "max_refinements"),
    "profile": ("preset", "v0", "rho0", "p0", "isentropic"),
    "ode": ("t_max", "tol"),
    "pde": ("cells", "cfl", "t_end", "boundary", "steepen_factor", "compare_factor", "snapshots", "refine"),
    "output": ("report", "dir", "log", "entropy_form"),
}


class Scenario:
    """
    Everything one command needs: gas, profile on its window, and the
    adjustments of the three numerical stages.
    """

    def __init__(
        self,
        name: str,
        gas: GasParams,
        profile: Profile,
        criterion: CriterionAdjustment,
        ode: ODEAdjustment,
        fv: FVAdjustment,
        refine: Optional[List[int]] = None,
        output: Optional[Dict[str, Any]] = None,
        source: str = "<preset>",
    ):
        self.name: str = name
        self.gas: GasParams = gas
        self.profile: Profile = profile
        self.criterion: CriterionAdjustment = criterion
        self.ode: ODEAdjustment = ode
        self.fv: FVAdjustment = fv
        self.refine: List[int] = sorted(refine) if refine else [fv.cells]
        self.output: Dict[str, Any] = output or {}
        self.source: str = source

    @property
    def finest_cells(self) -> int:
        return max(self.refine)

    def asDict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "source": self.source,
            "gas": self.gas.asDict(),
            "profile": self.profile.asDict(),
            "criterion": self.criterion.asDict(),
            "ode": self.ode.asDict(),
            "pde": dict(self.fv.asDict(), refine=list(self.refine)),
        }

    def __repr__(self) -> str:
        return f"Scenario(name={self.name!r}, gamma={self.gas.gamma}, profile={self.profile!r})"


def _fail(source: str, key: str, message: str):
    raise ScenarioError(f"{source}: {key}: {message}")


def _number(source: str, section: dict, sname: str, key: str, default, integer: bool = False):
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(source, f"[{sname}].{key}", f"expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        _fail(source, f"[{sname}].{key}", f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        _fail(source, f"[{sname}].{key}", f"must be finite, got {value!r}")
    return int(value) if integer else float(value)


def _require(source: str, key: str, ok: bool, message: str):
    if not ok:
        _fail(source, key, message)


def scenario_from_dict(data: Dict[str, Any], source: str = "<dict>", name: str = "") -> Scenario:
    """
    Validate a decoded TOML table and build the scenario.

    Raises:
        ScenarioError: unknown section or key, bad type or value out of range,
            unknown preset.
        ExpressionSyntaxError: a profile expression does not parse; the
            message names the file and key.
    """
    for sname, section in data.items():
        if sname not in SECTIONS:
            _fail(source, f"[{sname}]", f"unknown section, expected one of {', '.join(SECTIONS)}")
        if not isinstance(section, dict):
            _fail(source, f"[{sname}]", "expected a table")
        for key in section:
            if key not in SECTIONS[sname]:
                _fail(source, f"[{sname}].{key}", f"unknown key, expected one of {', '.join(SECTIONS[sname])}")

    gas_t = data.get("gas", {})
    gamma = _number(source, gas_t, "gas", "gamma", 1.4)
    _require(source, "[gas].gamma", gamma != 0.0, "must be non-zero")
    gas = GasParams(gamma)

    dom = data.get("domain", {})
    criterion = CriterionAdjustment(
        nodes=_number(source, dom, "domain", "nodes", 401, integer=True),
        refine_fraction=_number(source, dom, "domain", "refine_fraction", 1e-6),
        max_refinements=_number(source, dom, "domain", "max_refinements", 64, integer=True),
    )
    _require(source, "[domain].nodes", criterion.nodes >= 3, f"must be at least 3, got {criterion.nodes}")
    _require(source, "[domain].refine_fraction", 0.0 < criterion.refine_fraction < 1.0, "must lie in (0, 1)")
    _require(source, "[domain].max_refinements", criterion.max_refinements >= 0, "must be non-negative")

    prof = data.get("profile", {})
    preset = prof.get("preset")
    pr: Optional[Profile] = None
    if preset is not None:
        if not isinstance(preset, str) or preset not in PROFILE_PRESETS:
            _fail(source, "[profile].preset", f"unknown preset {preset!r}, expected one of {', '.join(PROFILE_PRESETS)}")
        pr = preset_profile(preset, gamma)
    texts = {}
    for key in ("v0", "rho0", "p0"):
        if key in prof:
            if not isinstance(prof[key], str):
                _fail(source, f"[profile].{key}", "expected an expression string")
            try:
                texts[key] = parse(prof[key])
            except ExpressionSyntaxError as e:
                raise type(e)(f"{source}: [profile].{key}: {e.detail}", offset=e.offset, expected=e.expected) from e
        elif pr is None:
            _fail(source, f"[profile].{key}", "missing (give all of v0, rho0, p0 or a preset)")

    a = _number(source, dom, "domain", "a", pr.a if pr is not None else -1.0)
    b = _number(source, dom, "domain", "b", pr.b if pr is not None else 1.0)
    _require(source, "[domain]", a < b, f"needs a < b, got a={a}, b={b}")
    if pr is None:
        pr = Profile(texts["v0"], texts["rho0"], texts["p0"], (a, b), name or Path(source).stem)
    else:
        pr = Profile(
            texts.get("v0", pr.v0), texts.get("rho0", pr.rho0), texts.get("p0", pr.p0), (a, b), pr.name
        )
    isentropic = prof.get("isentropic", False)
    _require(source, "[profile].isentropic", isinstance(isentropic, bool), "expected true or false")
    if isentropic:
        pr = pr.isentropic(gas)

    ode_t = data.get("ode", {})
    tol = _number(source, ode_t, "ode", "tol", None)
    ode = ODEAdjustment(t_max=_number(source, ode_t, "ode", "t_max", 100.0))
    _require(source, "[ode].t_max", ode.t_max > 0.0, f"must be positive, got {ode.t_max}")
    if tol is not None:
        _require(source, "[ode].tol", tol > 0.0, f"must be positive, got {tol}")
        ode = ode.with_tol(tol)

    pde = data.get("pde", {})
    boundary_name = pde.get("boundary", "periodic")
    boundary = BoundaryMode.named(boundary_name) if isinstance(boundary_name, str) else None
    if boundary is None:
        _fail(source, "[pde].boundary", f"unknown mode {boundary_name!r}, expected one of {', '.join(BoundaryMode.__members__)}")
    snapshots = pde.get("snapshots", [])
    _require(source, "[pde].snapshots", isinstance(snapshots, list), "expected a list of times")
    fv = FVAdjustment(
        cells=_number(source, pde, "pde", "cells", 256, integer=True),
        cfl=_number(source, pde, "pde", "cfl", 0.4),
        t_end=_number(source, pde, "pde", "t_end", 1.0),
        boundary=boundary,
        steepen_factor=_number(source, pde, "pde", "steepen_factor", 10.0),
        compare_factor=_number(source, pde, "pde", "compare_factor", 1.5),
        snapshot_times=tuple(_number(source, {"snapshots": t}, "pde", "snapshots", 0.0) for t in snapshots),
    )
    _require(source, "[pde].cells", fv.cells >= 16, f"must be at least 16, got {fv.cells}")
    _require(source, "[pde].cfl", 0.0 < fv.cfl <= 0.5, f"must lie in (0, 0.5], got {fv.cfl}")
    _require(source, "[pde].t_end", fv.t_end > 0.0, f"must be positive, got {fv.t_end}")
    refine = pde.get("refine", [])
    _require(
        source,
        "[pde].refine",
        isinstance(refine, list) and all(isinstance(n, int) and not isinstance(n, bool) and n >= 16 for n in refine),
        "expected a list of cell counts, each at least 16",
    )

    output = data.get("output", {})
    for key in ("report", "dir", "log"):
        _require(source, f"[output].{key}", isinstance(output.get(key, ""), str), "expected a path string")
    _require(source, "[output].entropy_form", isinstance(output.get("entropy_form", False), bool), "expected true or false")

    scenario = Scenario(name or pr.name or Path(source).stem, gas, pr, criterion, ode, fv, refine, dict(output), source)
    logger.debug(f"loaded {scenario}")
    return scenario


def load_scenario(path) -> Scenario:
    """
    Read a scenario file.

    Raises:
        ScenarioError: unreadable file, TOML syntax error (with line and
            column) or invalid content.
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as e:
        raise ScenarioError(f"{path}: cannot read scenario: {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"{path}: {e}") from e
    return scenario_from_dict(data, str(path))


def scenario_from_text(text: str, source: str = "<text>", name: str = "") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"{source}: {e}") from e
    return scenario_from_dict(data, source, name)


# ----------------------------------------------------------------------
#                          EMBEDDED SCENARIOS
# ----------------------------------------------------------------------

SCENARIO_PRESETS: Dict[str, str] = {
    "remark1": """
[gas]
gamma = 1.4
[profile]
preset = "remark1"
[pde]
cells = 256
t_end = 0.5
boundary = "extrapolate"
""",
    "remark1-pulse": """
[gas]
gamma = 1.4
[profile]
preset = "remark1-pulse"
[pde]
cells = 1024
t_end = 3.0
boundary = "extrapolate"
""",
    "remark1-tanh": """
[gas]
gamma = 1.4
[profile]
preset = "remark1-tanh"
[pde]
cells = 256
t_end = 3.0
boundary = "extrapolate"
""",
    "linear-compression": """
[gas]
gamma = 1.4
[profile]
preset = "linear-compression"
[pde]
cells = 256
refine = [256, 512, 1024]
t_end = 0.95
boundary = "linear"
""",
    "isentropic-bump": """
[gas]
gamma = 1.4
[profile]
preset = "isentropic-bump"
[pde]
cells = 256
t_end = 1.0
boundary = "extrapolate"
""",
    "chaplygin-demo": """
[gas]
gamma = -1.0
[profile]
preset = "chaplygin-demo"
""",
    "isothermal-demo": """
[gas]
gamma = 1.0
[profile]
preset = "isothermal-demo"
[pde]
cells = 256
t_end = 1.0
boundary = "extrapolate"
""",
    "constant": """
[gas]
gamma = 1.4
[profile]
preset = "constant"
[pde]
cells = 64
t_end = 5.0
""",
    "acoustic-pulse": """
[gas]
gamma = 1.4
[profile]
preset = "acoustic-pulse"
[pde]
cells = 128
t_end = 0.3
""",
    "entropy-spot": """
[gas]
gamma = 1.4
[profile]
preset = "entropy-spot"
[pde]
cells = 256
t_end = 1.0
boundary = "extrapolate"
""",
}


def preset_scenario(name: str) -> Scenario:
    """
    Raises:
        ScenarioError: unknown preset name.
    """
    text = SCENARIO_PRESETS.get(name)
    if text is None:
        raise ScenarioError(f"unknown preset {name!r}, expected one of {', '.join(SCENARIO_PRESETS)}")
    return scenario_from_text(text, f"<preset {name}>", name)


def resolve_scenario(spec: str) -> Scenario:
    """A preset name or a path to a TOML file."""
    if spec in SCENARIO_PRESETS and not Path(spec).exists():
        return preset_scenario(spec)
    return load_scenario(spec)
