"""Text form of radius distributions.

    finite:0.5,0.3,0.2 | frac:c=2 | powratio:a=4 | geomdefect:C=0.5,r=0.5
    harmonic:r=0.3,alpha0=0.7 | polylog:C=0.5,a=2,b=1

Transforms wrap a base and nest freely::

    sparse(eps=0.5;<base>)
    pgf(geom1:p=0.5;<base>)      count laws: geom1:p= fixed:m= poisson1:lam= pmf:p0,p1,...
    suscept(const:0.5;<base>)    sequences: const:p recip geom:r= list:p0,p1,...

``format_dist(parse_dist(s))`` is the canonical form of ``s``.
"""

from __future__ import annotations

from fractions import Fraction

from .dist_catalog import (
    CountLaw,
    DistributionError,
    RadiusDistribution,
    SusceptibilitySeq,
    make_family,
    transform_pgf,
    transform_sparse,
    transform_susceptible,
)

__all__ = ["parse_dist", "format_dist", "SpecSyntaxError"]


class SpecSyntaxError(DistributionError):
    pass


def _split_top(s: str, sep: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            return s[:i], s[i + 1:]
    raise SpecSyntaxError(f"expected {sep!r} in {s!r}")


def _number(tok: str) -> float:
    try:
        return float(Fraction(tok.strip()))
    except (ValueError, ZeroDivisionError):
        raise SpecSyntaxError(f"not a number: {tok!r}") from None


def _kv(body: str) -> dict[str, float]:
    out = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise SpecSyntaxError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = _number(v)
    return out


def _head(s: str) -> tuple[str, str]:
    if ":" in s:
        name, body = s.split(":", 1)
        return name.strip(), body.strip()
    return s.strip(), ""


def _count_law(s: str) -> CountLaw:
    name, body = _head(s)
    if name == "pmf":
        return CountLaw("pmf", tuple(_number(t) for t in body.split(",")))
    kv = _kv(body)
    key = {"geom1": "p", "fixed": "m", "poisson1": "lam"}.get(name)
    if key is None or set(kv) != {key}:
        raise SpecSyntaxError(f"bad count law {s!r}")
    return CountLaw(name, (kv[key],))


def _susceptibility(s: str) -> SusceptibilitySeq:
    name, body = _head(s)
    if name == "recip":
        return SusceptibilitySeq("recip", ())
    if name == "geom":
        kv = _kv(body)
        if set(kv) != {"r"}:
            raise SpecSyntaxError(f"bad susceptibility sequence {s!r}")
        return SusceptibilitySeq("geom", (kv["r"],))
    if name in ("const", "list"):
        vals = tuple(_number(t) for t in body.split(","))
        if name == "const" and len(vals) != 1:
            raise SpecSyntaxError("const takes exactly one value")
        return SusceptibilitySeq(name, vals)
    raise SpecSyntaxError(f"bad susceptibility sequence {s!r}")


def parse_dist(text: str) -> RadiusDistribution:
    """Parse a distribution spec string. Raises ``DistributionError``."""
    s = text.strip()
    if not s:
        raise SpecSyntaxError("empty distribution spec")
    paren = s.find("(")
    colon = s.find(":")
    if paren != -1 and (colon == -1 or paren < colon):
        name = s[:paren].strip()
        if not s.endswith(")"):
            raise SpecSyntaxError(f"unbalanced parentheses in {s!r}")
        arg, base_text = _split_top(s[paren + 1:-1], ";")
        base = parse_dist(base_text)
        if name == "sparse":
            kv = _kv(arg)
            if set(kv) != {"eps"}:
                raise SpecSyntaxError("sparse takes eps=<value>")
            return transform_sparse(base, kv["eps"])
        if name == "pgf":
            return transform_pgf(base, _count_law(arg))
        if name == "suscept":
            return transform_susceptible(base, _susceptibility(arg))
        raise SpecSyntaxError(f"unknown transform {name!r}")
    name, body = _head(s)
    if name == "finite":
        toks = [t.strip() for t in body.split(",") if t.strip()]
        try:
            vals = [Fraction(t) for t in toks]
        except (ValueError, ZeroDivisionError):
            raise SpecSyntaxError(f"bad finite pmf {body!r}") from None
        return make_family("finite", values=vals)
    return make_family(name, **_kv(body))


def format_dist(dist: RadiusDistribution) -> str:
    return dist.spec()
