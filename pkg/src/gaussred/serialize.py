"""Certificate documents: building, digesting and independent re-verification.

Every document is a JSON object with a ``type`` and a ``digest`` (sha256 of
the canonical JSON of everything else).  Verification re-checks the stored
claims against their invariants and replays the deterministic construction
from the stored inputs; the digest additionally pins the inputs themselves.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from . import cover
from .constants import CurveParams, effective_bounds
from .dirichlet import ApproxCertificate, approx_gauss_reduced
from .elliptic import RatPoint, WeierstrassCurve, height_pairing_gram
from .morphism import (
    GaussReducedForm,
    Morphism,
    classify,
    enumerate_gauss_reduced,
    gauss_reduce,
    is_gauss_reduced,
)
from .mwlattice import MWModel, quasi_orthonormal_basis
from .qjson import q, qmat, unq, unqmat

__all__ = [
    "canonical_json",
    "seal",
    "verify",
    "reduce_certificate",
    "approx_certificate",
    "enumerate_certificate",
    "bounds_certificate",
    "cover_certificate",
    "special_certificate",
    "quasi_special_certificate",
    "reverse_certificate",
    "heights_certificate",
]


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _digest(data: dict) -> str:
    body = {k: v for k, v in data.items() if k not in _UNSIGNED}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def seal(data: dict) -> dict:
    out = dict(data)
    out["digest"] = _digest(out)
    return out


_UNSIGNED = ("digest", "trial")


def _strip(data: dict) -> dict:
    return {k: v for k, v in data.items() if k not in _UNSIGNED}


# builders


def reduce_certificate(psi: Morphism) -> dict:
    form = gauss_reduce(psi)
    return seal({"type": "reduce", **form.to_json()})


def approx_certificate(phi, Q: int) -> dict:
    return seal(approx_gauss_reduced(phi, Q).to_json())


def enumerate_certificate(g: int, r: int, M: int) -> dict:
    items = [m.to_json() for m in enumerate_gauss_reduced(g, r, M)]
    return seal({"type": "enumerate", "g": g, "r": r, "M": M, "count": len(items), "morphisms": items})


def bounds_certificate(params: CurveParams) -> dict:
    report = effective_bounds(params)
    return seal({"type": "bounds", "params": params.to_json(), **report.to_json()})


def cover_certificate(model, phi, x, y, xi, eps, K1) -> dict:
    return seal(cover.simulate_prop_a(model, phi, x, y, xi, eps, K1).to_json())


def special_certificate(model: MWModel, phi: Morphism, x, y, xi, basis_K, eps, K1) -> dict:
    basis = quasi_orthonormal_basis(model, Fraction(basis_K))
    inj = cover.special_injection(model, phi, x, y, xi, basis, eps, K1)
    return seal(
        {
            "type": "special",
            "model": model.to_json(),
            "phi": phi.to_json(),
            "x": qmat(x),
            "y": qmat(y),
            "xi": qmat(xi),
            "basis_K": q(basis_K),
            "eps": q(eps),
            "K1": q(K1),
            "tphi": inj.tphi.to_json(),
            "N": str(inj.N),
            "G": _ring_matrix(inj.G),
            "content": [str(inj.n.x), str(inj.n.y)],
            "point": qmat(inj.point),
            "label": inj.label,
            "preconditions": inj.preconditions,
        }
    )


def _ring_matrix(m):
    return [[[str(e.x), str(e.y)] if hasattr(e, "x") else str(e) for e in row] for row in m]


def _elem_json(e):
    return [str(e.x), str(e.y)]


def quasi_special_certificate(tpsi: Morphism, g: int) -> dict:
    qs = cover.quasi_special_reduce(tpsi, g)
    return seal(
        {
            "type": "quasi_special",
            "tpsi": tpsi.to_json(),
            "g": g,
            "tphi": qs.tphi.to_json(),
            "N": _elem_json(qs.N),
            "phi": qs.phi.to_json(),
            "phi_prime": qs.phi_prime.to_json() if qs.phi_prime is not None else None,
            "delta": _ring_matrix(qs.delta),
            "N1": _elem_json(qs.N1),
            "n1": _elem_json(qs.n1),
            "label": qs.label,
            "shortcut": qs.shortcut,
        }
    )


def reverse_certificate(model, tphi: Morphism, g: int, p_indices, x, xi, xi_p, eps, K3, c_p, eps_p) -> dict:
    qs = cover.quasi_special_reduce(tphi, g)
    rev = cover.equiv_reverse(model, qs, p_indices, x, xi, xi_p, eps, K3, c_p, eps_p)
    return seal(
        {
            "type": "reverse",
            "model": model.to_json(),
            "tphi": tphi.to_json(),
            "g": g,
            "p_indices": list(p_indices),
            "x": qmat(x),
            "xi": qmat(xi),
            "xi_p": qmat(xi_p),
            "eps": q(eps),
            "K3": q(K3),
            "c_p": q(c_p),
            "eps_p": q(eps_p),
            "y": qmat(rev.y),
            "zeta": qmat(rev.zeta),
            "zeta_norm_sq": q(rev.zeta_norm_sq),
            "K4": q(rev.K4),
            "holds": rev.holds,
            "checks": rev.preconditions,
        }
    )


def heights_certificate(curve: WeierstrassCurve, points, precision) -> dict:
    gram = height_pairing_gram(curve, points, precision)
    out = gram.to_json()
    out["model"] = gram.to_model().to_json()
    return seal(out)


# verification


def _rebuild_or_fail(fails, build, data):
    try:
        fresh = build()
    except Exception as exc:  # any failure to replay means the document is wrong
        fails.append(f"replay failed: {type(exc).__name__}: {exc}")
        return
    if _strip(fresh) != _strip(data):
        diff = sorted(k for k in set(fresh) | set(data) if k not in _UNSIGNED and fresh.get(k) != data.get(k))
        fails.append(f"replay mismatch in {diff}")


def _verify_reduce(data):
    form = GaussReducedForm.from_json(data)
    fails = form.check()
    _rebuild_or_fail(fails, lambda: reduce_certificate(form.psi), data)
    return fails


def _verify_approx(data):
    cert = ApproxCertificate.from_json(data)
    fails = cert.check()
    if unq(data["rhs_pow_n"]) != cert.rhs_pow_n:
        fails.append("rhs_pow_n does not match Q and f")
    if not is_gauss_reduced(cert.phi):
        fails.append("phi is not Gauss-reduced")
        return fails
    _rebuild_or_fail(fails, lambda: approx_certificate(cert.phi, cert.Q), data)
    return fails


def _verify_enumerate(data):
    fails = []
    g, r, M = int(data["g"]), int(data["r"]), int(data["M"])
    items = [Morphism.from_json(m) for m in data["morphisms"]]
    if int(data["count"]) != len(items):
        fails.append("count differs from the number of morphisms")
    if len(set(items)) != len(items):
        fails.append("duplicate morphisms")
    for m in items:
        chk = is_gauss_reduced(m)
        if not chk or chk.pivot.x > M or m.r != r or m.g != g:
            fails.append(f"{m.to_ints()} is not Gauss-reduced of height <= M")
            break
    _rebuild_or_fail(fails, lambda: enumerate_certificate(g, r, M), data)
    return fails


def _verify_bounds(data):
    params = CurveParams.from_json(data["params"])
    fails = []
    try:
        report = effective_bounds(params)
    except Exception as exc:
        return [f"replay failed: {exc}"]
    fails += report.check()
    _rebuild_or_fail(fails, lambda: bounds_certificate(params), data)
    return fails


def _verify_cover(data):
    cert = cover.CoverCertificate.from_json(data)
    fails = cert.check()
    if unq(data["xi_prime_norm_sq"]) != cert.xi_prime_norm_sq:
        fails.append("recorded |xi'|^2 differs from the recomputed norm")
    if cert.witness_y is None:
        fails.append("missing witness")
        return fails
    _rebuild_or_fail(
        fails,
        lambda: cover_certificate(cert.model, cert.phi, cert.x, cert.witness_y, cert.witness_xi, cert.eps, cert.K1),
        data,
    )
    return fails


def _verify_special(data):
    fails = []
    model = MWModel.from_json(data["model"])
    phi = Morphism.from_json(data["phi"])
    tphi = Morphism.from_json(data["tphi"])
    g = phi.g
    label = classify(tphi, g, tphi.g - g).label
    if label != data["label"]:
        fails.append(f"recorded label {data['label']} but tphi is {label}")
    if all(data["preconditions"].values()) and label != "special":
        fails.append("hypotheses recorded as holding but tphi is not special")
    _rebuild_or_fail(
        fails,
        lambda: special_certificate(
            model, phi, unqmat(data["x"]), unqmat(data["y"]), unqmat(data["xi"]),
            unq(data["basis_K"]), unq(data["eps"]), unq(data["K1"]),
        ),
        data,
    )
    return fails


def _verify_quasi_special(data):
    fails = []
    tpsi = Morphism.from_json(data["tpsi"])
    tphi = Morphism.from_json(data["tphi"])
    g = int(data["g"])
    label = classify(tphi, g, tphi.g - g).label
    if label != data["label"] or label not in ("special", "quasi-special"):
        fails.append(f"tphi classifies as {label}")
    _rebuild_or_fail(fails, lambda: quasi_special_certificate(tpsi, g), data)
    return fails


def _verify_reverse(data):
    fails = []
    if not data.get("holds"):
        fails.append("reverse embedding bound recorded as failing")
    bad = [k for k, v in data.get("checks", {}).items() if not v]
    if bad:
        fails.append(f"failed checks {bad}")
    model = MWModel.from_json(data["model"])
    zeta = unqmat(data["zeta"])
    if max(model.norm_sq(p) for p in zeta) > (unq(data["eps"]) * unq(data["K4"])) ** 2:
        fails.append("|zeta| exceeds eps K4")
    _rebuild_or_fail(
        fails,
        lambda: reverse_certificate(
            model, Morphism.from_json(data["tphi"]), int(data["g"]), tuple(data["p_indices"]),
            unqmat(data["x"]), unqmat(data["xi"]), unqmat(data["xi_p"]),
            unq(data["eps"]), unq(data["K3"]), unq(data["c_p"]), unq(data["eps_p"]),
        ),
        data,
    )
    return fails


def _verify_heights(data):
    from .intervals import Enclosure

    fails = []
    gram = [[Enclosure.from_json(e) for e in row] for row in data["gram"]]
    s = len(gram)
    if any(gram[i][j] != gram[j][i] for i in range(s) for j in range(s)):
        fails.append("gram is not symmetric")
    if any(e.width > unq(data["precision"]) for row in gram for e in row):
        fails.append("an entry is wider than the requested precision")
    curve = WeierstrassCurve.from_json(data["curve"])
    points = [RatPoint.from_json(p) for p in data["points"]]
    _rebuild_or_fail(fails, lambda: heights_certificate(curve, points, unq(data["precision"])), data)
    return fails


VERIFIERS = {
    "reduce": _verify_reduce,
    "approx": _verify_approx,
    "enumerate": _verify_enumerate,
    "bounds": _verify_bounds,
    "cover": _verify_cover,
    "special": _verify_special,
    "quasi_special": _verify_quasi_special,
    "reverse": _verify_reverse,
    "heights": _verify_heights,
}


def verify(data: dict, *, check_digest: bool = True) -> list[str]:
    """Failures found in a certificate document (empty when it verifies)."""
    if not isinstance(data, dict):
        return ["certificate is not a JSON object"]
    kind = data.get("type")
    if kind not in VERIFIERS:
        return [f"unknown certificate type {kind!r}"]
    fails = []
    if check_digest and data.get("digest") != _digest(data):
        fails.append("digest mismatch")
    try:
        fails += VERIFIERS[kind](data)
    except Exception as exc:  # malformed fields surface as verification failures
        fails.append(f"malformed {kind} certificate: {type(exc).__name__}: {exc}")
    return fails
