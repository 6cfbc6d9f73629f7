"""Command-line driver: ``fuscomp VERB [options]``.

Every verb prints one report, JSON by default, with canonical orderings so
repeated runs on identical inputs are byte-identical.  Subgroups are named
by their canonical id in the universe group (``centrics`` lists them) or by
``S``.
"""

from __future__ import annotations

import functools
import json
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import green as gr
from . import idem
from . import mackey as mk
from . import mackeymod as mm
from . import orbitprod
from .fusion import FusionSystem, fusion_from_group, load_fusion
from .grp import Subgroup, load_group, perm_to_cycles, sylow_subgroup
from .linalg import QQ, CoefficientRing, fp

ITEM_OF_REWRITE = {
    "swap": 1,
    "selfS": 2,
    "iso_right": 3,
    "iso_left": 4,
    "pullback_right": 5,
    "pullback_left": 6,
    "triple": 7,
}

MODULE_KINDS = ("regular", "projective", "example", "example-literal")


class Failure(Exception):
    """A report whose checks did not all hold; exit status 1."""


# ---------------------------------------------------------------------------
# rendering


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return int(x.numerator) if x.denominator == 1 else str(x)
    if isinstance(x, Subgroup):
        return x.canonical_id
    if x is None or isinstance(x, (str, float)):
        return x
    return str(x)


def _text(x, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(x, dict):
        for k, v in x.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(i, (dict, list)) for i in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(x, list):
        for v in x:
            if isinstance(v, (dict, list)):
                sub = _text(v, indent + 1)
                lines.append(f"{pad}-")
                lines.extend(sub)
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(x)}")
    return lines


def emit(report: dict, out: str) -> None:
    data = _plain(report)
    if out == "json":
        click.echo(json.dumps(data, indent=2))
    else:
        click.echo("\n".join(_text(data)))


# ---------------------------------------------------------------------------
# inputs


class Inputs:
    def __init__(self, group: str, fusion: str | None, prime: int, field: str, seed: int):
        self.group_source = group
        self.fusion_source = fusion
        self.prime = prime
        self.field = field
        self.seed = seed

    @functools.cached_property
    def F(self) -> FusionSystem:
        if self.fusion_source:
            return load_fusion(self.fusion_source)
        G = load_group(self.group_source)
        S = sylow_subgroup(G, self.prime)
        return fusion_from_group(G, S, self.prime, label=f"F_S({G.name or self.group_source})")

    @property
    def R(self) -> CoefficientRing:
        return QQ if self.field == "q0" else fp(self.F.p)

    def subgroup(self, ident: str | None, option: str, required: bool = True) -> Subgroup | None:
        F = self.F
        if ident is None:
            if required:
                raise click.UsageError(f"{option} is required for this verb")
            return None
        if ident == "S":
            return F.S
        try:
            n = int(ident)
        except ValueError:
            raise click.BadParameter(f"expected a canonical subgroup id or S, got {ident!r}", param_hint=option)
        for A in F.subgroups:
            if A.canonical_id == n:
                return A
        raise click.BadParameter(f"no subgroup of S has canonical id {n}", param_hint=option)

    def centric(self, ident: str | None, option: str) -> Subgroup:
        A = self.subgroup(ident, option)
        if not self.F.is_centric(A):
            raise click.BadParameter(f"subgroup {ident} is not F-centric", param_hint=option)
        return A


def common(fn):
    @click.option("--group", default="D8", show_default=True, help="Group file or bundled name.")
    @click.option("--fusion", default=None, help="Fusion system file (overrides --group).")
    @click.option("-p", "prime", default=2, show_default=True, type=int, help="The prime p.")
    @click.option("--field", type=click.Choice(["p", "q0"]), default="p", show_default=True)
    @click.option("--out", type=click.Choice(["json", "text"]), default="json", show_default=True)
    @click.option("--seed", type=int, default=idem.DEFAULT_SEED, show_default=True, help="Idempotent splitting seed.")
    @functools.wraps(fn)
    def wrapper(group, fusion, prime, field, out, seed, **kw):
        inputs = Inputs(group, fusion, prime, field, seed)
        report = fn(inputs, **kw)
        emit(report, out)
        if report.get("holds") is False or report.get("passed") is False:
            raise Failure()

    return wrapper


def module_options(fn):
    fn = click.option("--summand", type=int, default=None, help="Take this indecomposable summand of the module.")(fn)
    return click.option("--module", "kind", type=click.Choice(MODULE_KINDS), default="regular", show_default=True)(fn)


def build_module(F: FusionSystem, R: CoefficientRing, kind: str, H: Subgroup | None, summand: int | None, seed: int):
    Q = mm.centric_quotient(F, R)
    if kind == "regular":
        M = mm.generated_module(F, R, Q.unit_vector(), label="mu/I")
    elif kind == "projective":
        if H is None:
            raise click.UsageError("--module projective needs --H")
        e = Q.vec(mk.MackeyElement.basis(R, mk.identity_key(H)))
        M = mm.cyclic_module(F, R, e, label="mu/I I_H")
    else:
        if H is None:
            fours = gr.klein_fours(F)
            if not fours:
                raise click.UsageError("no Klein four with automizer of order 6 in this system")
            H = fours[0]
        e = Q.vec(gr.example_element(F, H, R))
        if kind == "example":
            e = gr.local_summand_element(F, R, e, seed)
        M = mm.cyclic_module(F, R, e, label=kind)
    if summand is not None:
        pieces = idem.module_summands(M, seed)
        if not 0 <= summand < len(pieces):
            raise click.BadParameter(f"module has {len(pieces)} summands", param_hint="--summand")
        M = pieces[summand].module
    return M


def _cycles(G, x: int) -> str:
    cyc = perm_to_cycles(G.perms[x])
    return "".join("(" + ",".join(str(i) for i in c) + ")" for c in cyc) or "()"


def _hom(G, phi) -> list[list[str]]:
    return [[_cycles(G, a), _cycles(G, b)] for a, b in zip(phi.source.elements, phi.images)]


def _sub(A: Subgroup) -> dict:
    return {"id": A.canonical_id, "order": A.order}


def _levels(M) -> list[dict]:
    return [{"id": K.canonical_id, "order": K.order, "dim": M.dim(K)} for K in M.levels]


# ---------------------------------------------------------------------------
# verbs


@click.group()
def cli():
    """Fusion systems, centric Mackey functors and the Green correspondence."""


@cli.command()
@common
def centrics(inp: Inputs) -> dict:
    """List the F-centric subgroups of S."""
    F = inp.F
    G = F.G
    out = []
    for A in sorted(F.centric_subgroups, key=lambda s: s.canonical_id):
        out.append(
            {
                "id": A.canonical_id,
                "order": A.order,
                "elements": [_cycles(G, a) for a in A.elements],
                "aut_order": len(F.aut(A)),
                "fully_normalized": F.is_fully_normalized(A),
            }
        )
    return {"system": F.describe(), "S_order": F.S.order, "subgroups": len(F.subgroups), "count": len(out), "centric": out}


@cli.command()
@common
def saturation(inp: Inputs) -> dict:
    """Check the saturation axioms."""
    return {"system": inp.F.describe(), **inp.F.saturation_report()}


@cli.command()
@common
@click.option("--H", "h", default=None)
@click.option("--K", "k", default=None)
def product(inp: Inputs, h, k) -> dict:
    """The representing set of the product of H and K in the orbit category."""
    F = inp.F
    H, K = inp.centric(h, "--H"), inp.centric(k, "--K")
    prod = orbitprod.product_pairs(F, H, K)
    pairs = [{"A": _sub(p.A), "hom": _hom(F.G, p.hom)} for p in prod.pairs]
    universal = orbitprod.universal_property_report(F, H, K)
    return {"H": _sub(H), "K": _sub(K), "count": len(pairs), "pairs": pairs, "universal_property": universal["holds"], "holds": universal["holds"]}


@cli.command()
@common
@click.option("--H", "h", default=None)
@click.option("--K", "k", default=None)
def decompose(inp: Inputs, h, k) -> dict:
    """Split the product of H and K along the normalizer system of H."""
    F = inp.F
    H, K = inp.centric(h, "--H"), inp.centric(k, "--K")
    blocks = orbitprod.decompose_product(F, H, K)
    rep = orbitprod.verify_decomposition(F, H, K)
    listed = [
        {"A": _sub(b.pair.A), "N": _sub(b.N), "hat": _hom(F.G, b.hat.rep), "pairs": len(b.pairs)}
        for b in blocks
    ]
    return {"H": _sub(H), "K": _sub(K), "blocks": listed, "covers_product": rep["valid"], "images_are_A": rep["images_are_A"], "holds": rep["holds"]}


def _basis(F: FusionSystem, centric_only: bool):
    return mk.mackey_basis(F, centric_only=centric_only)


@cli.command("mackey-basis")
@common
@click.option("--centric/--all", default=False, help="List only the basis of the centric quotient.")
def mackey_basis_cmd(inp: Inputs, centric: bool) -> dict:
    """The basis of the Mackey algebra (or of its centric quotient)."""
    F = inp.F
    basis = _basis(F, centric)
    listed = [
        {"index": i, "A": k.A.canonical_id, "B": k.B.canonical_id, "C": k.C.canonical_id, "images": list(k.images), "describe": k.describe()}
        for i, k in enumerate(basis)
    ]
    report = {"count": len(basis), "centric_only": centric, "basis": listed}
    if not centric:
        oracle = mk.biset_basis_count(F)
        report["biset_count"] = oracle
        report["holds"] = oracle == len(basis)
    return report


@cli.command("mackey-mul")
@common
@click.option("--x", "xi", type=int, default=None, help="Index of the left factor in the full basis.")
@click.option("--y", "yi", type=int, default=None, help="Index of the right factor in the full basis.")
def mackey_mul(inp: Inputs, xi, yi) -> dict:
    """Products of basis elements, compared with biset composition."""
    F = inp.F
    basis = _basis(F, False)
    index = {k: i for i, k in enumerate(basis)}
    if (xi is None) != (yi is None):
        raise click.UsageError("give both --x and --y, or neither for the full table")
    pairs = [(xi, yi)] if xi is not None else [(i, j) for i in range(len(basis)) for j in range(len(basis))]
    table, agree = [], True
    for i, j in pairs:
        if not (0 <= i < len(basis) and 0 <= j < len(basis)):
            raise click.BadParameter(f"basis indices run from 0 to {len(basis) - 1}")
        X, Y = basis[i], basis[j]
        if X.A != Y.B:
            continue
        prod = mk.multiply_keys(X, Y)
        agree = agree and prod == mk.biset_product(X, Y)
        for Z in sorted(prod, key=lambda z: index[z]):
            table.append([i, j, index[Z], prod[Z]])
    return {"basis_size": len(basis), "entries": table, "biset_oracle_agrees": agree, "holds": agree}


def _burnside_dict(omega: mk.BurnsideElement) -> list[list]:
    return [[H.canonical_id, c] for H, c in sorted(omega.coeffs, key=lambda hc: hc[0].canonical_id)]


@cli.command()
@common
def burnside(inp: Inputs) -> dict:
    """Structure constants, unit and inverse of S in the centric Burnside ring."""
    F, R = inp.F, inp.R
    classes = sorted(mk.burnside_classes(F), key=lambda s: s.canonical_id)
    table = []
    for H in classes:
        for K in classes:
            prod = mk.burnside_product(F, R, mk.burnside_class(F, R, H), mk.burnside_class(F, R, K))
            table.append([H.canonical_id, K.canonical_id, _burnside_dict(prod)])
    u = mk.burnside_unit(F, R)
    return {
        "field": R.describe(),
        "classes": [_sub(H) for H in classes],
        "products": table,
        "unit": _burnside_dict(u.unit),
        "S_inverse": _burnside_dict(u.S_inverse),
    }


@cli.command()
@common
def gamma(inp: Inputs) -> dict:
    """Image of the Burnside ring in the centre of the centric quotient."""
    return {"field": inp.R.describe(), **mk.gamma_report(inp.F, inp.R)}


@cli.command()
@common
@module_options
@click.option("--H", "h", default=None)
def module(inp: Inputs, kind, summand, h) -> dict:
    """Dump a module: levels, dimensions and sparse action matrices."""
    F = inp.F
    H = inp.centric(h, "--H") if h is not None else None
    M = build_module(F, inp.R, kind, H, summand, inp.seed)
    check = M.validate()
    return {"kind": kind, "valid": check["valid"], "checked": check["checked"], **mm.module_to_json(M), "holds": check["valid"]}


@cli.command()
@common
@module_options
@click.option("--H", "h", default=None, help="Subgroup used to build --module projective/example.")
@click.option("--family", multiple=True, help="Centric subgroup id (repeatable).")
def projectivity(inp: Inputs, kind, summand, h, family) -> dict:
    """Whether Id_M lies in the sum of the transfer ideals of the family."""
    F = inp.F
    H = inp.centric(h, "--H") if h is not None else None
    M = build_module(F, inp.R, kind, H, summand, inp.seed)
    fam = [inp.centric(x, "--family") for x in family]
    res = mm.relative_projectivity(M, fam)
    return {"module": _levels(M), "family": [_sub(K) for K in res.family], "projective": res.projective}


@cli.command()
@common
@module_options
@click.option("--H", "h", default=None)
def vertex(inp: Inputs, kind, summand, h) -> dict:
    """Defect set and vertex of a module."""
    F = inp.F
    H = inp.centric(h, "--H") if h is not None else None
    M = build_module(F, inp.R, kind, H, summand, inp.seed)
    data = mm.vertex(M)
    return {
        "module": _levels(M),
        "indecomposable": idem.is_indecomposable(M, inp.seed),
        "defect_set": [_sub(K) for K in sorted(data.defect_set, key=lambda s: s.canonical_id)],
        "defect_groups": [_sub(K) for K in data.defect_groups],
        "vertex": None if data.vertex is None else _sub(data.vertex),
    }


def _classified(res: gr.CorrespondenceResult) -> dict:
    return {
        "direction": res.direction,
        "H": _sub(res.H),
        "X": [_sub(K) for K in sorted(res.X, key=lambda s: s.canonical_id)],
        "Y": [_sub(K) for K in sorted(res.Y, key=lambda s: s.canonical_id)],
        "distinguished": res.distinguished,
        "summands": [
            {"levels": _levels(s.module), "h_projective": s.h_projective, "family_projective": s.family_projective}
            for s in res.summands
        ],
        "checks": {k: v for k, v in res.checks.items()},
    }


def _example_report(ambient: str, klein: int, idempotent: str, seed: int) -> dict:
    report = gr.verify_example(ambient=ambient, klein=klein, idempotent=idempotent, seed=seed)
    return {"example": "klein-four", "ambient": ambient, "klein": klein, "idempotent": idempotent, **report}


EXAMPLE_AMBIENTS = {"gl23": "GL3_2", "gl23-literal": "GL2_3"}


@cli.command("green")
@common
@module_options
@click.option("--H", "h", default=None)
@click.option("--direction", type=click.Choice(["down", "up"]), default="down", show_default=True)
@click.option("--example", type=click.Choice(sorted(EXAMPLE_AMBIENTS)), default=None, help="Run the worked example instead.")
def green_cmd(inp: Inputs, kind, summand, h, direction, example) -> dict:
    """Green correspondent of a module (or the worked example pipeline).

    ``--example gl23`` runs the rank-two Klein four example over F_D8(GL3(2));
    ``gl23-literal`` runs it over GL2(3).
    """
    if example is not None:
        return _example_report(EXAMPLE_AMBIENTS[example], 0, "local", inp.seed)
    F = inp.F
    if inp.field != "p":
        raise click.UsageError("the Green correspondence is computed over F_p only")
    H = inp.centric(h, "--H")
    if direction == "down":
        M = build_module(F, inp.R, kind, H if kind != "regular" else None, summand, inp.seed)
        res = gr.green_down(M, H, inp.seed)
        back = gr.green_up(res.correspondent, F, H, inp.seed)
        rt = idem.modules_isomorphic(back.correspondent, M, inp.seed)
    else:
        NF = orbitprod.nf_system(F, H)
        M = build_module(NF, inp.R, kind, H if kind != "regular" else None, summand, inp.seed)
        res = gr.green_up(M, F, H, inp.seed)
        back = gr.green_down(res.correspondent, H, inp.seed, algebra_check=False)
        rt = idem.modules_isomorphic(back.correspondent, M, inp.seed)
    return {"input": _levels(M), **_classified(res), "round_trip": rt, "holds": rt}


@cli.command("verify-example")
@common
@click.option("--ambient", default="GL3_2", show_default=True, help="GL3_2 or the literal GL2_3.")
@click.option("--klein", type=int, default=0, show_default=True, help="Which Klein four (0 or 1).")
@click.option("--idempotent", type=click.Choice(["local", "literal", "corrupt"]), default="local", show_default=True)
def verify_example_cmd(inp: Inputs, ambient, klein, idempotent) -> dict:
    """The worked example as an ordered list of steps."""
    return _example_report(ambient, klein, idempotent, inp.seed)


SUITES = ("properties-HXK", "universal", "decomposition", "gamma", "transfer", "nf-transfer", "workaround")


@cli.command("verify-identities")
@common
@module_options
@click.option("--suite", type=click.Choice(SUITES), required=True)
@click.option("--H", "h", default=None, help="Fully normalized centric H for nf-transfer and workaround.")
def verify_identities(inp: Inputs, kind, summand, suite, h) -> dict:
    """Run one identity suite and report each item."""
    F = inp.F
    if suite == "properties-HXK":
        rep = orbitprod.verify_all_rewrites(F)
        items = {}
        for kind_name, item in ITEM_OF_REWRITE.items():
            n = rep["instances"].get(kind_name, 0)
            bad = sum(1 for f in rep["failures"] if f["kind"] == kind_name)
            items[f"({item})"] = {"instances": n, "holds": bad == 0, "applicable": n > 0}
        return {"suite": suite, "items": items, "holds": rep["holds"]}
    if suite == "universal":
        cent = F.centric_subgroups
        out, ok = [], True
        for H in cent:
            for K in cent:
                r = orbitprod.universal_property_report(F, H, K)
                ok = ok and r["holds"]
                out.append([H.canonical_id, K.canonical_id, r["cones"], r["holds"]])
        return {"suite": suite, "pairs": out, "holds": ok}
    if suite == "decomposition":
        out, ok = [], True
        for H in F.centric_subgroups:
            if not F.is_fully_normalized(H):
                continue
            for K in F.centric_subgroups:
                r = orbitprod.verify_decomposition(F, H, K)
                ok = ok and r["holds"]
                out.append([H.canonical_id, K.canonical_id, r["blocks"], r["holds"]])
        return {"suite": suite, "pairs": out, "holds": ok}
    if suite == "gamma":
        return {"suite": suite, "field": inp.R.describe(), **mk.gamma_report(F, inp.R)}
    H = inp.centric(h, "--H") if h is not None else None
    M = build_module(F, inp.R, kind, H if kind != "regular" else None, summand, inp.seed)
    if suite == "transfer":
        rep = mm.transfer_property_report(M)
        items = {f"({i})": rep[i] for i in sorted(rep, key=int)}
        return {"suite": suite, "module": _levels(M), "items": items, "holds": all(v["holds"] for v in rep.values())}
    targets = [H] if H is not None else [K for K in F.centric_subgroups if F.is_fully_normalized(K)]
    out, ok = [], True
    for K in targets:
        if suite == "nf-transfer":
            r = mm.nf_transfer_report(M, K)
            holds = r["composition"] and r["image_equals_ideal"]
        else:
            r = mm.workaround_report(M, K, seed=inp.seed)
            holds = r["holds"]
        ok = ok and holds
        out.append({"H": _sub(K), **{k: v for k, v in r.items()}, "holds": holds})
    return {"suite": suite, "module": _levels(M), "results": out, "holds": ok}


def _origin(exc: BaseException) -> str:
    """Name of the innermost package module that raised ``exc``."""
    origin = "cli"
    tb = exc.__traceback__
    while tb is not None:
        path = Path(tb.tb_frame.f_code.co_filename)
        if path.parent == Path(__file__).parent:
            origin = path.stem
        tb = tb.tb_next
    return origin


def run(argv=None) -> int:
    """Entry point returning an exit status (0 pass, 1 failed checks, 2 usage or input errors)."""
    try:
        cli.main(args=argv, prog_name="fuscomp", standalone_mode=False)
    except Failure:
        return 1
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        click.echo(f"error [{_origin(exc)}]: {exc}", err=True)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
