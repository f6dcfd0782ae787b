import enum


class SdrKind(enum.Enum):
    piecewise_min = "piecewise_min"
    greenshields = "greenshields"
    tabulated = "tabulated"


class DemandKind(enum.Enum):
    trapezoid_ramp = "trapezoid_ramp"
    tabulated = "tabulated"


class DistanceForm(enum.Enum):
    uniform_ccdf = "uniform_ccdf"


class SupplyPolicy(enum.Enum):
    balanced = "balanced"        # s = a00 - d10, idle fleet constant
    fixed_fleet = "fixed_fleet"  # s = 0


class ControlMode(enum.Enum):
    none = "none"
    db = "db"
    scheduled = "scheduled"  # piecewise-constant admission, used by the optimality check


class PoolingMode(enum.Enum):
    off = "off"
    fixed = "fixed"
    saturated = "saturated"
    dp = "dp"


class Stage(enum.Enum):
    collecting = "collecting"
    delivering = "delivering"


class CommandName(enum.Enum):
    simulate = "simulate"
    pool = "pool"
    probe = "probe"
    sweep = "sweep"
    convergence = "convergence"
    replicate = "replicate"


class OutputFormat(enum.Enum):
    csv = "csv"
    json = "json"
