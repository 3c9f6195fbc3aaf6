"""Concept graphs with state-dependent linkage weights.

A cognitive map here is a directed graph of bounded concepts.  Edge weights
are small parametric functions rather than constants, so the influence of a
cause on an effect can depend on the sign of the cause's current realisation
or on the realisation of a third, intermediate concept (a side linkage).
Networks are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .errors import ValidationError
from .validation import check_in_interval, check_unit_interval

# ---------------------------------------------------------------------------
# concepts


class ConceptKind(str, Enum):
    STATE = "state"
    AUXILIARY = "auxiliary"
    INPUT = "input"
    PARAMETER = "parameter"

    @property
    def updatable(self) -> bool:
        """Whether the synchronous update law rewrites this concept."""
        return self in (ConceptKind.STATE, ConceptKind.AUXILIARY)


class Realisation(float):
    """A concept intensity, constrained to [-1, 1] at construction."""

    def __new__(cls, value) -> "Realisation":
        v = check_unit_interval(value, "realisation")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"Realisation({float(self)!r})"


@dataclass(frozen=True)
class ConceptSpec:
    """A node: identity, display name, role, and admissible interval."""

    id: int
    name: str
    kind: ConceptKind
    interval: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if not isinstance(self.id, int) or isinstance(self.id, bool):
            raise ValidationError(f"concept id must be an integer, got {self.id!r}")
        if not self.name:
            raise ValidationError("concept name must be non-empty")
        object.__setattr__(self, "kind", ConceptKind(self.kind))
        lo = check_unit_interval(self.interval[0], f"concept {self.id} interval lower bound")
        hi = check_unit_interval(self.interval[1], f"concept {self.id} interval upper bound")
        if lo > hi:
            raise ValidationError(
                f"concept {self.id} interval is empty: [{lo}, {hi}]"
            )
        object.__setattr__(self, "interval", (lo, hi))


# ---------------------------------------------------------------------------
# weight functions

CONSTANT = "constant"
PIECEWISE_SIGN = "piecewise_sign"
SCALED_BY_INTERMEDIATE = "scaled_by_intermediate"
AFFINE_IN_INTERMEDIATE = "affine_in_intermediate"

#: parameter names per family, in serialization order
FAMILY_PARAMS: dict[str, tuple[str, ...]] = {
    CONSTANT: ("w",),
    PIECEWISE_SIGN: ("w_minus", "w_plus"),
    SCALED_BY_INTERMEDIATE: ("w_base",),
    AFFINE_IN_INTERMEDIATE: ("w0", "w1"),
}

#: families whose weight reads an intermediate concept (complex linkages)
INTERMEDIATE_FAMILIES = frozenset({SCALED_BY_INTERMEDIATE, AFFINE_IN_INTERMEDIATE})


@dataclass(frozen=True)
class WeightFunction:
    """A parametric edge weight.

    Families:
      * ``constant``: w
      * ``piecewise_sign``: w_minus if the cause is negative, 0 at zero,
        w_plus if positive
      * ``scaled_by_intermediate``: w_base * A(intermediate)
      * ``affine_in_intermediate``: w0 + w1 * A(intermediate)

    Parameters are validated so the family's range over [-1, 1] inputs stays
    within [-1, 1].
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise ValidationError(
                f"unknown weight family {self.family!r}; "
                f"expected one of {sorted(FAMILY_PARAMS)}"
            )
        names = FAMILY_PARAMS[self.family]
        params = tuple(
            check_in_interval(p, f"{self.family} parameter {n!r}", -1.0, 1.0)
            for n, p in zip(names, self.params, strict=True)
        )
        if self.family == AFFINE_IN_INTERMEDIATE:
            w0, w1 = params
            if abs(w0) + abs(w1) > 1.0:
                raise ValidationError(
                    f"affine_in_intermediate needs |w0| + |w1| <= 1, got {w0}, {w1}"
                )
        object.__setattr__(self, "params", params)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, w: float) -> "WeightFunction":
        return cls(CONSTANT, (w,))

    @classmethod
    def piecewise_sign(cls, w_minus: float, w_plus: float) -> "WeightFunction":
        return cls(PIECEWISE_SIGN, (w_minus, w_plus))

    @classmethod
    def scaled_by_intermediate(cls, w_base: float) -> "WeightFunction":
        return cls(SCALED_BY_INTERMEDIATE, (w_base,))

    @classmethod
    def affine_in_intermediate(cls, w0: float, w1: float) -> "WeightFunction":
        return cls(AFFINE_IN_INTERMEDIATE, (w0, w1))

    # -- behaviour ----------------------------------------------------------

    @property
    def needs_intermediate(self) -> bool:
        return self.family in INTERMEDIATE_FAMILIES

    @property
    def param_map(self) -> dict[str, float]:
        return dict(zip(FAMILY_PARAMS[self.family], self.params))

    def __call__(
        self,
        a_cause: float,
        a_effect: float,
        a_intermediate: Optional[float] = None,
    ) -> float:
        """Evaluate the weight against current realisations.

        ``a_effect`` is accepted for the general two-argument influence form
        but no shipped family reads it.
        """
        if self.needs_intermediate:
            if a_intermediate is None:
                raise ValidationError(
                    f"{self.family} weight requires an intermediate realisation"
                )
        elif a_intermediate is not None:
            raise ValidationError(
                f"{self.family} weight takes no intermediate realisation"
            )
        if self.family == CONSTANT:
            return self.params[0]
        if self.family == PIECEWISE_SIGN:
            w_minus, w_plus = self.params
            if a_cause < 0:
                return w_minus
            if a_cause > 0:
                return w_plus
            return 0.0
        if self.family == SCALED_BY_INTERMEDIATE:
            return self.params[0] * a_intermediate
        w0, w1 = self.params
        return w0 + w1 * a_intermediate


def evaluate_weight(
    fn: WeightFunction,
    a_cause: float,
    a_effect: float,
    a_intermediate: Optional[float] = None,
) -> float:
    """Evaluate a weight function; see :class:`WeightFunction.__call__`."""
    return fn(a_cause, a_effect, a_intermediate)


# ---------------------------------------------------------------------------
# linkages and networks


@dataclass(frozen=True)
class Linkage:
    """A directed influence from ``cause`` to ``effect``.

    Complex linkages (families that read an intermediate) carry exactly one
    side concept; simple linkages carry none.
    """

    cause: int
    effect: int
    weight: WeightFunction
    intermediate: Optional[int] = None

    def __post_init__(self):
        if self.cause == self.effect:
            raise ValidationError(f"self-linkage on concept {self.cause} not allowed")
        if self.weight.needs_intermediate and self.intermediate is None:
            raise ValidationError(
                f"linkage {self.cause}->{self.effect}: family "
                f"{self.weight.family!r} requires an intermediate concept"
            )
        if not self.weight.needs_intermediate and self.intermediate is not None:
            raise ValidationError(
                f"linkage {self.cause}->{self.effect}: family "
                f"{self.weight.family!r} takes no intermediate concept"
            )

    @property
    def complex(self) -> bool:
        return self.intermediate is not None


THRESHOLDS = ("clamp",)


@dataclass(frozen=True, eq=False)
class Network:
    """An immutable concept graph plus per-concept memory coefficients.

    ``alpha`` maps state/auxiliary concept ids to their self-memory
    coefficient in [0, 1]; it must cover every linkage effect, and any
    updatable concept it omits behaves as alpha = 0.  ``threshold`` names the
    squashing applied after each update; only ``"clamp"`` (to the concept's
    admissible interval) is implemented.
    """

    concepts: tuple[ConceptSpec, ...]
    linkages: tuple[Linkage, ...] = ()
    alpha: Mapping[int, float] = field(default_factory=dict)
    threshold: str = "clamp"

    def __post_init__(self):
        concepts = tuple(sorted(self.concepts, key=lambda c: c.id))
        if not concepts:
            raise ValidationError("a network needs at least one concept")
        ids = [c.id for c in concepts]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate concept ids in {ids}")
        by_id = {c.id: c for c in concepts}

        linkages = tuple(sorted(self.linkages, key=lambda l: (l.effect, l.cause)))
        seen_pairs = set()
        for link in linkages:
            for role, cid in (("cause", link.cause), ("effect", link.effect)):
                if cid not in by_id:
                    raise ValidationError(
                        f"linkage {link.cause}->{link.effect}: unknown {role} concept {cid}"
                    )
            if link.intermediate is not None and link.intermediate not in by_id:
                raise ValidationError(
                    f"linkage {link.cause}->{link.effect}: unknown intermediate "
                    f"concept {link.intermediate}"
                )
            if not by_id[link.effect].kind.updatable:
                raise ValidationError(
                    f"linkage {link.cause}->{link.effect}: effect concept is "
                    f"{by_id[link.effect].kind.value} and cannot be driven"
                )
            pair = (link.cause, link.effect)
            if pair in seen_pairs:
                raise ValidationError(
                    f"multiple linkages on the pair {link.cause}->{link.effect}"
                )
            seen_pairs.add(pair)

        alpha_items = []
        for cid, value in dict(self.alpha).items():
            if cid not in by_id:
                raise ValidationError(f"alpha references unknown concept {cid}")
            if not by_id[cid].kind.updatable:
                raise ValidationError(
                    f"alpha on concept {cid} ({by_id[cid].kind.value}); only "
                    f"state/auxiliary concepts carry memory"
                )
            alpha_items.append((cid, check_in_interval(value, f"alpha[{cid}]", 0.0, 1.0)))
        alpha_map = dict(sorted(alpha_items))
        for link in linkages:
            if link.effect not in alpha_map:
                raise ValidationError(
                    f"alpha missing for effect concept {link.effect}"
                )

        if self.threshold not in THRESHOLDS:
            raise ValidationError(
                f"unknown threshold {self.threshold!r}; expected one of {THRESHOLDS}"
            )

        object.__setattr__(self, "concepts", concepts)
        object.__setattr__(self, "linkages", linkages)
        object.__setattr__(self, "alpha", alpha_map)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(
            self,
            "_key",
            (concepts, linkages, tuple(alpha_map.items()), self.threshold),
        )

    # identity is structural, so equal networks hash together and the
    # compiled-form cache can key on the network itself
    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (
            f"Network({len(self.concepts)} concepts, {len(self.linkages)} linkages)"
        )

    # -- lookups -------------------------------------------------------------

    def concept(self, concept_id: int) -> ConceptSpec:
        try:
            return self._by_id[concept_id]
        except KeyError:
            raise KeyError(f"unknown concept id {concept_id}") from None

    @property
    def concept_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.concepts)

    @property
    def concept_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.concepts)

    def alpha_of(self, concept_id: int) -> float:
        self.concept(concept_id)
        return self.alpha.get(concept_id, 0.0)

    def complex_linkages(self) -> tuple[Linkage, ...]:
        return tuple(l for l in self.linkages if l.complex)


# ---------------------------------------------------------------------------
# serialization


def network_to_dict(net: Network) -> dict:
    return {
        "concepts": [
            {
                "id": c.id,
                "name": c.name,
                "kind": c.kind.value,
                "interval": [c.interval[0], c.interval[1]],
            }
            for c in net.concepts
        ],
        "linkages": [
            {
                "cause": l.cause,
                "effect": l.effect,
                **({"intermediate": l.intermediate} if l.complex else {}),
                "family": l.weight.family,
                "params": l.weight.param_map,
            }
            for l in net.linkages
        ],
        "alpha": {str(cid): value for cid, value in net.alpha.items()},
        "threshold": net.threshold,
    }


def network_from_dict(doc: Mapping) -> Network:
    try:
        concepts = tuple(
            ConceptSpec(
                id=int(c["id"]),
                name=str(c["name"]),
                kind=ConceptKind(c.get("kind", "state")),
                interval=tuple(c.get("interval", (-1.0, 1.0))),
            )
            for c in doc["concepts"]
        )
        linkages = []
        for entry in doc.get("linkages", ()):
            family = entry["family"]
            if family not in FAMILY_PARAMS:
                raise ValidationError(
                    f"unknown weight family {family!r} in linkage "
                    f"{entry.get('cause')}->{entry.get('effect')}"
                )
            params = entry["params"]
            ordered = tuple(params[name] for name in FAMILY_PARAMS[family])
            linkages.append(
                Linkage(
                    cause=int(entry["cause"]),
                    effect=int(entry["effect"]),
                    weight=WeightFunction(family, ordered),
                    intermediate=(
                        int(entry["intermediate"]) if "intermediate" in entry else None
                    ),
                )
            )
        alpha = {int(k): float(v) for k, v in doc.get("alpha", {}).items()}
        return Network(
            concepts=concepts,
            linkages=tuple(linkages),
            alpha=alpha,
            threshold=doc.get("threshold", "clamp"),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed network document: {exc}") from exc


def network_to_json(net: Network, indent: int = 2) -> str:
    return json.dumps(network_to_dict(net), indent=indent, sort_keys=True)


def network_from_json(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid network JSON: {exc}") from exc
    return network_from_dict(doc)
