"""
Configuration management for KO laboratory runs.
Handles loading and validation of run settings from flags and KOLAB_ environment variables.
"""

import os
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from kolab.errors import CapExceededError
from kolab.scalars import is_prime
from kolab.superalg import Shape

# Load environment variables from .env file
load_dotenv()

MODES = ("raw", "certified")
OUTPUTS = ("text", "json")
Q_TARGETS = ("T", "filtration")
CONDITIONAL_POLICIES = ("auto", "pass", "fail")


def parse_heights(value: Optional[str], n: int) -> Tuple[int, ...]:
    """
    Parse "1,2" into (1, 2); a single value is broadcast to all n heights.

    Raises:
        ValueError: If the list has the wrong length or is not numeric
    """
    if value is None or str(value).strip() == "":
        return (1,) * n
    parts = [part.strip() for part in str(value).split(",") if part.strip()]
    try:
        heights = tuple(int(part) for part in parts)
    except ValueError:
        raise ValueError(f"heights must be integers, got '{value}'")
    if len(heights) == 1:
        return heights * n
    if len(heights) != n:
        raise ValueError(f"expected {n} heights, got {len(heights)}")
    return heights


@dataclass(frozen=True)
class RunConfig:
    """One run of the laboratory: field, rank, truncation and reporting options."""

    p: int = 3
    n: int = 1
    t: Tuple[int, ...] = ()
    mode: str = "certified"
    seed: int = 42
    output: str = "text"
    max_dim: int = 5000
    automorphisms: int = 20
    workers: int = 1
    q_target: str = "T"
    conditional: str = "auto"

    @staticmethod
    def from_env() -> Dict[str, Optional[str]]:
        """Load run settings from KOLAB_ environment variables."""
        return {
            'p': os.getenv('KOLAB_P'),
            'n': os.getenv('KOLAB_N'),
            't': os.getenv('KOLAB_T'),
            'mode': os.getenv('KOLAB_MODE'),
            'seed': os.getenv('KOLAB_SEED'),
            'output': os.getenv('KOLAB_OUTPUT'),
            'max_dim': os.getenv('KOLAB_MAX_DIM'),
            'automorphisms': os.getenv('KOLAB_AUTOMORPHISMS'),
            'workers': os.getenv('KOLAB_WORKERS'),
            'q_target': os.getenv('KOLAB_Q_TARGET'),
            'conditional': os.getenv('KOLAB_CONDITIONAL'),
        }

    @classmethod
    def resolve(cls, **overrides: Any) -> "RunConfig":
        """
        Build a config from defaults, then environment, then explicit overrides.

        Overrides set to None fall through to the environment.

        Raises:
            ValueError: If a numeric setting cannot be parsed
        """
        settings: Dict[str, Any] = {}
        for source in (cls.from_env(), overrides):
            for key, value in source.items():
                if value is not None:
                    settings[key] = value
        for key in ('p', 'n', 'seed', 'max_dim', 'automorphisms', 'workers'):
            if key in settings:
                try:
                    settings[key] = int(settings[key])
                except (TypeError, ValueError):
                    raise ValueError(f"{key} must be an integer, got '{settings[key]}'")
        n = settings.get('n', cls.n)
        t = settings.get('t')
        settings['t'] = tuple(t) if isinstance(t, (tuple, list)) else parse_heights(t, n)
        return cls(**settings)

    def validate(self) -> tuple[bool, Optional[str]]:
        """Validate the run settings."""
        if not is_prime(self.p) or self.p <= 2:
            return False, f"p must be a prime greater than 2, got {self.p}"
        if self.n < 1:
            return False, f"n must be positive, got {self.n}"
        if len(self.t) != self.n or any(h < 1 for h in self.t):
            return False, f"heights must be {self.n} integers ≥ 1, got {self.t}"
        if self.mode not in MODES:
            return False, f"Unknown mode '{self.mode}'. Use: raw or certified"
        if self.output not in OUTPUTS:
            return False, f"Unknown output '{self.output}'. Use: text or json"
        if self.q_target not in Q_TARGETS:
            return False, f"Unknown Q target '{self.q_target}'. Use: T or filtration"
        if self.conditional not in CONDITIONAL_POLICIES:
            return False, f"Unknown conditional policy '{self.conditional}'. Use: auto, pass or fail"
        if self.max_dim < 1 or self.automorphisms < 0 or self.workers < 1:
            return False, "max_dim and workers must be positive, automorphisms non-negative"
        return True, None

    def shape(self) -> Shape:
        """
        Contact shape of the run.

        Raises:
            CapExceededError: If dim O exceeds max_dim
        """
        shape = Shape.contact(self.n, self.p, self.t)
        if shape.dim > self.max_dim:
            raise CapExceededError(f"model dimension {shape.dim} exceeds cap {self.max_dim}")
        return shape

    def with_overrides(self, **changes: Any) -> "RunConfig":
        return replace(self, **changes)

    def header(self) -> Dict[str, Any]:
        return {"p": self.p, "n": self.n, "t": list(self.t), "mode": self.mode, "seed": self.seed}
