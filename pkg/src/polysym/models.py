"""Named concrete models for the command line, and the verify dispatcher."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from polysym.fields import Poly, RatFunc
from polysym.maps import (
    Composition, DerivOfSquare, FieldMap, FormalDerivative, Identity, LinearCombo,
    MomentForm, ProdOfHoms, QuadConjugation, QuadMap, Report, SecondOrderForm,
    SubstitutionHom, TwistedSecondOrder, Zero, check_classical_derivation_identity,
    check_moment1, check_multiplicative, check_order_two_derivation, check_parallelogram,
    check_pi2_additive, check_spadesuit, check_spadesuit_diagonal, check_twisted,
)
from polysym.sampling import QT, SQRT2

# polynomial used by the classical a(P(x)) = P'(x) a(x) check
CLASSICAL_POLY = Poly([0, 2, 0, 1])


class UsageError(ValueError):
    """Bad command-line request: unknown model or target, or a mismatched pair."""


@dataclass(frozen=True)
class Model:
    name: str
    description: str
    build: Callable[[], FieldMap | QuadMap]
    phis: Callable[[], tuple] | None = None  # (phi1, phi2) attached to the model

    def obj(self):
        return self.build()


def _d() -> FieldMap:
    return FormalDerivative()


def _dd() -> FieldMap:
    return Composition((_d(), _d()))


def _sub() -> FieldMap:
    return SubstitutionHom(Poly([0, 0, 1]))


def _combo() -> FieldMap:
    return LinearCombo(((3, _d()), (RatFunc.t(), _dd())))


def _ids():
    return Identity(QT), Identity(QT)


def _subs():
    return _sub(), _sub()


_MODELS = [
    # field maps
    Model("d", "formal derivative d/dt on Q(t)", _d, _ids),
    Model("dd", "second derivative d o d on Q(t)", _dd, _ids),
    Model("combo", "3d + t(d o d), an operator of order two", _combo, _ids),
    Model("sub-d", "sub[t^2] o d o d, for phi1 = phi2 = sub[t^2]",
          lambda: Composition((_sub(), _d(), _d())), _subs),
    Model("sub-minus-id", "sub[t^2] - id, additive but not of order two",
          lambda: _sub() - Identity(QT), _ids),
    Model("id", "identity of Q(t)", lambda: Identity(QT), _ids),
    Model("zero", "zero map on Q(t)", lambda: Zero(QT), _ids),
    # quadratic maps
    Model("square", "x^2 on Q(t)", lambda: ProdOfHoms(Identity(QT), Identity(QT))),
    Model("prod-homs", "sub[t^2](x) * x on Q(t)", lambda: ProdOfHoms(_sub(), Identity(QT))),
    Model("norm-sqrt2", "field norm x * conj(x) on Q(sqrt 2)",
          lambda: ProdOfHoms(Identity(SQRT2), QuadConjugation(SQRT2))),
    Model("deriv-square", "d(x^2) = 2x d(x)", lambda: DerivOfSquare(_d())),
    Model("second-order-d", "4x d(x) - d(x^2)", lambda: SecondOrderForm(_d())),
    Model("second-order-dd", "4x D(x) - D(x^2) with D = d o d", lambda: SecondOrderForm(_dd())),
    Model("second-order-combo", "4x D(x) - D(x^2) with D = 3d + t(d o d)",
          lambda: SecondOrderForm(_combo())),
    Model("twisted-sub", "phi(4x d(x) - d(x^2)) with phi = sub[t^2]",
          lambda: TwistedSecondOrder(_sub(), _d()), lambda: (_sub(), _sub())),
    Model("moment-form", "2(x + x) D(x) - D(x^2) with D = d o d",
          lambda: MomentForm(Identity(QT), Identity(QT), _dd()), _ids),
    Model("moment-form-sub", "2(phi(x) + phi(x)) a(x) - a(x^2), phi = sub[t^2], a = phi o d o d",
          lambda: MomentForm(_sub(), _sub(), Composition((_sub(), _d(), _d()))), _subs),
]

MODELS: dict[str, Model] = {m.name: m for m in _MODELS}


def get_model(name: str) -> Model:
    try:
        return MODELS[name]
    except KeyError:
        raise UsageError(f"unknown model {name!r}; known: {', '.join(MODELS)}") from None


def _quad(model: Model) -> QuadMap:
    obj = model.obj()
    if not isinstance(obj, QuadMap):
        raise UsageError(f"model {model.name!r} is a field map, a quadratic map is needed")
    return obj


def _map(model: Model) -> FieldMap:
    obj = model.obj()
    if not isinstance(obj, FieldMap):
        raise UsageError(f"model {model.name!r} is a quadratic map, a field map is needed")
    return obj


def field_map(name: str) -> FieldMap:
    return _map(get_model(name))


def _phis(model: Model, target: str) -> tuple:
    if model.phis is None:
        raise UsageError(f"model {model.name!r} carries no homomorphisms for {target}")
    return model.phis()


def _twisted(m: Model, n: int, rng) -> list[Report]:
    return [check_twisted(_quad(m), _phis(m, "twisted")[0], n, rng)]


def _moment1(m: Model, n: int, rng) -> list[Report]:
    p1, p2 = _phis(m, "moment1")
    return [check_moment1(_quad(m), p1, p2, n, rng)]


def _spadesuit(m: Model, n: int, rng) -> list[Report]:
    a = _map(m)
    p1, p2 = _phis(m, "spadesuit")
    return [check_spadesuit(a, p1, p2, n, rng), check_spadesuit_diagonal(a, p1, p2, n, rng)]


TARGETS: dict[str, Callable[[Model, int, random.Random], list[Report]]] = {
    "mult": lambda m, n, rng: [check_multiplicative(_quad(m), n, rng)],
    "pi2": lambda m, n, rng: [check_pi2_additive(_quad(m), n, rng)],
    "twisted": _twisted,
    "moment1": _moment1,
    "spadesuit": _spadesuit,
    "classical": lambda m, n, rng: [
        check_classical_derivation_identity(_map(m), CLASSICAL_POLY, n, rng)],
    "order2": lambda m, n, rng: [check_order_two_derivation(_map(m), n, rng)],
    "parallelogram": lambda m, n, rng: [check_parallelogram(_quad(m), n, rng)],
}


def run_verify(target: str, model_name: str, samples: int = 20,
               rng: random.Random | None = None) -> list[Report]:
    """Run the checks of ``target`` on a named model; check names get a ``[model]`` tag."""
    if target not in TARGETS:
        raise UsageError(f"unknown verify target {target!r}; known: {', '.join(TARGETS)}")
    if samples < 1:
        raise UsageError("sample count must be at least 1")
    model = get_model(model_name)
    rng = rng if rng is not None else random.Random(0)
    return [Report(f"{r.check}[{model.name}]", r.status, r.samples, r.witness)
            for r in TARGETS[target](model, samples, rng)]
