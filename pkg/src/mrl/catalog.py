"""Reinforcer catalogs: the discrete positive-feedback channels a trainer can dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field


class CatalogError(ValueError):
    """Raised for malformed or unknown catalogs."""


@dataclass(frozen=True)
class Reinforcer:
    id: int
    label: str
    message: str


@dataclass(frozen=True)
class ReinforcerCatalog:
    """Ordered set of reinforcers. Ids must be 0..n-1 contiguous, labels unique, n >= 2."""

    name: str
    entries: tuple[Reinforcer, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.entries) < 2:
            raise CatalogError(f"catalog {self.name!r} needs at least 2 reinforcers")
        ids = [e.id for e in self.entries]
        if ids != list(range(len(self.entries))):
            raise CatalogError(f"catalog {self.name!r} ids must be contiguous from 0")
        labels = [e.label for e in self.entries]
        if len(set(labels)) != len(labels):
            raise CatalogError(f"catalog {self.name!r} has duplicate labels")

    @property
    def n(self) -> int:
        return len(self.entries)

    def message_for(self, reinforcer_id: int) -> str:
        return self.entries[reinforcer_id].message


def _catalog(name, pairs):
    return ReinforcerCatalog(
        name=name,
        entries=tuple(Reinforcer(i, label, msg) for i, (label, msg) in enumerate(pairs)),
    )


# Four feedback channels for a physical assistant coaching a block-pattern task.
ROBOT4 = _catalog(
    "robot4",
    [
        ("verbal", "Nice effort, keep going. You are close."),
        ("hint", "Try turning that piece over and checking its other face."),
        ("simple-feedback", "That placement is incorrect."),
        ("gesture", "Pat on the back. Good try, give it another shot."),
    ],
)

# Seven coaching hints for the falling-blocks trainer. All messages authored here.
TETRIS7 = _catalog(
    "tetris7",
    [
        ("pace", "Keep lines clearing quickly to build your score."),
        ("preview", "Watch the next piece so you can plan two moves ahead."),
        ("flatness", "Keep the stack flat. Tall towers are hard to recover from."),
        ("gaps", "Avoid sealing empty cells under blocks. Covered gaps are costly."),
        ("edges", "Save a clean column at the edge for the long piece."),
        ("rotation", "Rotate early, while the piece is still high up."),
        ("calm", "Take a breath. Slow placements beat rushed ones."),
    ],
)

BUILTIN_CATALOGS = {c.name: c for c in (ROBOT4, TETRIS7)}

# Step size and smoothing window paired with each built-in catalog: the
# 4-reinforcer catalog runs alpha 0.015 / window 3, the 7-reinforcer one
# alpha 0.05 / window 5.
CATALOG_DEFAULTS = {
    "robot4": {"alpha": 0.015, "window_k": 3},
    "tetris7": {"alpha": 0.05, "window_k": 5},
}


def builtin_catalog(name: str) -> ReinforcerCatalog:
    try:
        return BUILTIN_CATALOGS[name]
    except KeyError:
        raise CatalogError(
            f"unknown catalog {name!r}; available: {sorted(BUILTIN_CATALOGS)}"
        ) from None


def default_engine_config(catalog: ReinforcerCatalog, seed: int = 0, **overrides):
    """EngineConfig with the step size and window conventional for the catalog."""
    from .engine import EngineConfig

    params = dict(CATALOG_DEFAULTS.get(catalog.name, {"alpha": 0.015, "window_k": 3}))
    params.update(overrides)
    return EngineConfig(n=catalog.n, seed=seed, **params)
