"""Tunable thresholds that stand in for the asymptotic constants of the method."""
import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import InvalidInput


@dataclass
class SolverConfig:
    # expansion constants
    C: float = 8.0
    C_prime: float = 0.0  # 0 means derived: max(1, C / 5000)
    small_set_divisor: float = 0.0  # 0 means derived: 2C
    expand_fraction_divisor: float = 5000.0
    reach_floor_divisor: float = 1e5
    # forest shape
    theta: float = 0.45
    link_exponent: float = 0.2
    medium_low: int = 5
    medium_high_exponent: float = 0.85
    mass_fraction: float = 0.1
    depth_cap: int = 8
    seed: int = 0
    # checkers
    s_max: int = 2
    sample_count: int = 200
    exact_cap: int = 20
    dense_cap: int = 500
    power_tol: float = 1e-8
    power_max_iter: int = 100000
    # rotations
    reach_state_cap: int = 20000
    part_mass_divisor: float = 500.0
    expand_floor: int = 1
    merge_pair_attempts: int = 4
    strict_close: bool = False
    merge_shakes: int = 6
    connector_budget: float = 0.5
    self_check: bool = False
    # linking structure and embedding
    link_size: int = 0  # 0 means derived from link_exponent
    gadget_marked: int = 8
    gadget_path_len: int = 3
    cert_len_low: int = 3
    cert_len_high: int = 8
    connector_length: int = 12
    extend_D: int = 5
    extend_retries: int = 40
    extend_search_budget: int = 4000
    embed_budget_fraction: float = 0.5
    audit_max_size: int = 12
    partition_retries: int = 8
    # solver
    fallback_first_below: int = 500
    posa_restarts: int = 30
    posa_rotation_budget: int = 200000

    def __post_init__(self):
        self.validate()

    @property
    def c_prime(self):
        return self.C_prime if self.C_prime > 0 else max(1.0, self.C / 5000.0)

    @property
    def small_divisor(self):
        return self.small_set_divisor if self.small_set_divisor > 0 else 2.0 * self.C

    def validate(self):
        if self.C <= 0:
            raise InvalidInput("C must be positive")
        cp = self.c_prime
        if not (self.C >= cp >= 1):
            raise InvalidInput("need C >= C_prime >= 1")
        for name in ("expand_fraction_divisor", "reach_floor_divisor", "part_mass_divisor",
                     "link_exponent", "medium_high_exponent"):
            if getattr(self, name) <= 0:
                raise InvalidInput(f"{name} must be positive")
        if not 0 < self.theta < 1:
            raise InvalidInput("theta must lie in (0, 1)")
        if self.depth_cap < 1:
            raise InvalidInput("depth_cap must be at least 1")
        if self.gadget_marked < 8 or self.gadget_marked % 4:
            raise InvalidInput("gadget_marked must be a multiple of 4, at least 8")
        if self.gadget_path_len < 1 or self.cert_len_low < 1 or self.cert_len_high < self.cert_len_low:
            raise InvalidInput("bad certificate length window")
        if not 0 <= self.mass_fraction <= 1:
            raise InvalidInput("mass_fraction must lie in [0, 1]")

    def with_(self, **kw):
        return replace(self, **kw)

    def to_dict(self):
        return asdict(self)

    def link_count(self, n):
        if self.link_size > 0:
            return self.link_size
        return max(2, int(round(n ** self.link_exponent)))

    def path_target(self, n):
        return max(1, int(math.ceil(n ** self.theta)))

    def medium_range(self, n):
        return self.medium_low, max(self.medium_low, int(n ** self.medium_high_exponent))

    @classmethod
    def from_text(cls, text, **overrides):
        """Flat key=value lines; '#' starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"config line {lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise InvalidInput(f"config line {lineno}: unknown key {key!r}")
            values[key] = _coerce(types[key], val, lineno)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def from_file(cls, path, **overrides):
        with open(path) as fh:
            return cls.from_text(fh.read(), **overrides)


def _coerce(typ, val, lineno):
    name = typ if isinstance(typ, str) else getattr(typ, "__name__", str(typ))
    try:
        if name == "bool":
            if val.lower() in ("1", "true", "yes", "on"):
                return True
            if val.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(val)
        if name == "int":
            return int(val)
        return float(val)
    except ValueError:
        raise InvalidInput(f"config line {lineno}: cannot parse {val!r} as {name}") from None
