"""Command-line driver: definition files in, report lines and DOT diagrams out.

    nablaops verify <suite> --operad symmetric --n-max 3 [--multicat F] [--monoid F]
    nablaops build wreath --multicat F --operad symmetric --variant tildeE --n-max 2 --dot out.dot

Exit status is 0 when every check passes, 1 on a failed check and 2 on a
usage or definition-file error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .finite_cats import FinCategory
from .group_operads import GroupOperad, builtin_operad
from .interval_cat import IntervalMorphism, format_values
from .multicats import (FinMulticategory, GSymAction, _typed_inputs, action_from_table,
                        trivial_action, validate_gsym, validate_multicat)
from .operators import Variant, WMor, wreath
from .segal_demo import FinMonoid
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

VARIANTS = {"E": Variant.E, "tildeE": Variant.TILDE_E, "G": Variant.G_PULL, "tildeG": Variant.TILDE_G_PULL}


class DefinitionError(ValueError):
    """A definition file that does not parse or does not validate.

    ``field`` is a JSON path such as ``morphisms[2].inputs[0]``.
    """

    def __init__(self, msg: str, path: str | Path | None = None, field: str | None = None,
                 line: int | None = None, witness: Any = None):
        self.path, self.field, self.line, self.witness = path, field, line, witness
        where = str(path) if path is not None else "<definitions>"
        if line is not None:
            where += f":{line}"
        if field:
            where += f": {field}"
        super().__init__(f"{where}: {msg}")


# -- interval morphisms as JSON ---------------------------------------------

def morphism_to_json(f: IntervalMorphism) -> list:
    """Values on 1..m, with the ends written as "-inf" and "+inf"."""
    top = f.cod_n + 1
    return ["-inf" if v == 0 else "+inf" if v == top else v for v in f.ext[1:-1]]


def morphism_from_json(values: Sequence, cod_n: int) -> IntervalMorphism:
    ext = [0]
    for v in values:
        if v == "-inf":
            ext.append(0)
        elif v == "+inf":
            ext.append(cod_n + 1)
        elif isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= cod_n:
            ext.append(v)
        else:
            raise ValueError(f"bad interval value {v!r} for codomain {cod_n}")
    ext.append(cod_n + 1)
    if any(a > b for a, b in zip(ext, ext[1:])):
        raise ValueError(f"values {list(values)!r} are not monotone")
    return IntervalMorphism.from_ext(cod_n, tuple(ext))


# -- definition files -------------------------------------------------------

def _load(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DefinitionError(f"cannot read: {exc.strerror}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DefinitionError(exc.msg, path, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise DefinitionError("top level must be an object", path)
    return data


def _need(obj: dict, key: str, kind: type, path, field: str):
    if key not in obj:
        raise DefinitionError(f"missing field {key!r}", path, field or None)
    val = obj[key]
    if not isinstance(val, kind):
        raise DefinitionError(f"expected {kind.__name__}", path, f"{field}.{key}" if field else key)
    return val


def _perm_element(G: GroupOperad, perm: Any, path, field: str):
    if not isinstance(perm, list) or sorted(perm) != list(range(1, len(perm) + 1)):
        raise DefinitionError("expected a permutation in one-line image form", path, field)
    hits = [x for x in G.elements(len(perm)) if tuple(G.to_perm(x)) == tuple(perm)]
    if len(hits) != 1:
        raise DefinitionError(f"{len(hits)} elements of {G.name} have this permutation", path, field)
    return hits[0]


def parse_multicat(data: dict, G: GroupOperad, path=None, name: str = "") -> GSymAction:
    objects = _need(data, "objects", list, path, "")
    known = set()
    for i, a in enumerate(objects):
        if not isinstance(a, str) or a in known:
            raise DefinitionError("objects must be distinct strings", path, f"objects[{i}]")
        known.add(a)
    morphisms = {}
    for i, m in enumerate(_need(data, "morphisms", list, path, "")):
        fld = f"morphisms[{i}]"
        if not isinstance(m, dict):
            raise DefinitionError("expected object", path, fld)
        nm = _need(m, "name", str, path, fld)
        ins = _need(m, "inputs", list, path, fld)
        out = _need(m, "output", str, path, fld)
        for j, a in enumerate(ins):
            if a not in known:
                raise DefinitionError(f"unknown object {a!r}", path, f"{fld}.inputs[{j}]")
        if out not in known:
            raise DefinitionError(f"unknown object {out!r}", path, f"{fld}.output")
        if nm in morphisms:
            raise DefinitionError(f"duplicate morphism {nm!r}", path, f"{fld}.name")
        morphisms[nm] = (tuple(ins), out)
    identities = _need(data, "identities", dict, path, "")
    for a, nm in identities.items():
        if a not in known:
            raise DefinitionError(f"unknown object {a!r}", path, f"identities.{a}")
        if nm not in morphisms:
            raise DefinitionError(f"unknown morphism {nm!r}", path, f"identities.{a}")
    missing = sorted(known - set(identities))
    if missing:
        raise DefinitionError(f"no identity for {missing[0]!r}", path, "identities")

    def ref(nm, fld):
        if nm not in morphisms:
            raise DefinitionError(f"unknown morphism {nm!r}", path, fld)
        return nm

    table = {}
    for i, c in enumerate(data.get("compositions", [])):
        fld = f"compositions[{i}]"
        if not isinstance(c, dict):
            raise DefinitionError("expected object", path, fld)
        outer = ref(_need(c, "outer", str, path, fld), f"{fld}.outer")
        inners = tuple(ref(g, f"{fld}.inners[{j}]") for j, g in enumerate(_need(c, "inners", list, path, fld)))
        table[(outer, inners)] = ref(_need(c, "result", str, path, fld), f"{fld}.result")
    M = FinMulticategory.from_table(objects, morphisms, identities, table, name=name)
    rep = validate_multicat(M)
    if not rep.passed:
        bad = rep.failures()[0]
        raise DefinitionError(f"not a multicategory ({bad.id})", path, "compositions", witness=bad.witness)

    if "symmetry" not in data:
        A = trivial_action(M, G)
    else:
        sym = {}
        for i, s in enumerate(_need(data, "symmetry", list, path, "")):
            fld = f"symmetry[{i}]"
            if not isinstance(s, dict):
                raise DefinitionError("expected object", path, fld)
            f = ref(_need(s, "morphism", str, path, fld), f"{fld}.morphism")
            x = _perm_element(G, _need(s, "perm", list, path, fld), path, f"{fld}.perm")
            sym[(f, x)] = ref(_need(s, "result", str, path, fld), f"{fld}.result")
        A = action_from_table(M, G, sym)
    rep = validate_gsym(M, A)
    if not rep.passed:
        bad = rep.failures()[0]
        raise DefinitionError(f"not a {G.name}-symmetric multicategory ({bad.id})", path, "symmetry",
                              witness=bad.witness)
    return A


def parse_monoid(data: dict, path=None, name: str = "") -> FinMonoid:
    elements = _need(data, "elements", list, path, "")
    by_key = {}
    for i, e in enumerate(elements):
        if isinstance(e, (dict, list)) or str(e) in by_key:
            raise DefinitionError("elements must be distinct scalars", path, f"elements[{i}]")
        by_key[str(e)] = e
    if "unit" not in data:
        raise DefinitionError("missing field 'unit'", path)
    if str(data["unit"]) not in by_key:
        raise DefinitionError(f"unknown element {data['unit']!r}", path, "unit")
    rows = _need(data, "table", dict, path, "")
    table = {}
    for x in elements:
        row = rows.get(str(x))
        if not isinstance(row, dict):
            raise DefinitionError("missing row", path, f"table.{x}")
        for y in elements:
            if str(y) not in row:
                raise DefinitionError("missing entry", path, f"table.{x}.{y}")
            xy = row[str(y)]
            if str(xy) not in by_key:
                raise DefinitionError(f"unknown element {xy!r}", path, f"table.{x}.{y}")
            table[(x, y)] = by_key[str(xy)]
    M = FinMonoid(tuple(elements), by_key[str(data["unit"])], table, name)
    rep = M.validate()
    if not rep.passed:
        bad = rep.failures()[0]
        raise DefinitionError(f"not a monoid ({bad.id})", path, "table", witness=bad.witness)
    return M


def parse_definitions(path: str | Path, operad: GroupOperad | None = None) -> FinMonoid | GSymAction:
    """A monoid file gives a FinMonoid; a multicategory file gives its action
    (``.multicat`` is the multicategory; no symmetry section means the trivial action)."""
    data = _load(path)
    name = data.get("name") or Path(path).stem
    if "elements" in data:
        return parse_monoid(data, path, name)
    if "objects" in data:
        return parse_multicat(data, operad or builtin_operad("symmetric"), path, name)
    raise DefinitionError("neither a multicategory nor a monoid definition", path)


def dump_multicat(A: GSymAction, names: dict | None = None) -> dict:
    """The JSON schema for ``A.multicat`` with its action; composites with
    identities are omitted. ``names`` renames labels (default ``str``)."""
    M, G = A.multicat, A.operad
    names = names or {}

    def nm(f):
        return names.get(f, str(f))

    ids = set(M.identities.values())
    comps = []
    for f in M.morphisms:
        if f in ids:
            continue
        for gs in _typed_inputs(M, f, M.arity_bound):
            if all(g in ids for g in gs):
                continue
            comps.append({"outer": nm(f), "inners": [nm(g) for g in gs], "result": nm(M.gamma(f, gs))})
    sym = []
    for f in M.morphisms:
        n = M.arity(f)
        for x in G.elements(n):
            if x != G.unit(n):
                sym.append({"morphism": nm(f), "perm": list(G.to_perm(x)), "result": nm(A(f, x))})
    return {
        "objects": list(M.objects),
        "morphisms": [{"name": nm(f), "inputs": list(ins), "output": out} for f, (ins, out) in M.morphisms.items()],
        "identities": {a: nm(f) for a, f in M.identities.items()},
        "compositions": comps,
        "symmetry": sym,
    }


def data_file(name: str) -> Path:
    """Path of a bundled definition file, e.g. ``sample.json``."""
    return Path(str(resources.files("nablaops") / "data" / name))


# -- DOT --------------------------------------------------------------------

def summarize(x: Any) -> str:
    if isinstance(x, IntervalMorphism):
        return format_values(x)
    if isinstance(x, WMor):
        return f"{summarize(x.base)} {summarize(x.fs)}"
    if isinstance(x, tuple):
        return "(" + ",".join(summarize(v) for v in x) + ")"
    return str(x)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(cat: FinCategory, name: str = "C") -> str:
    """One node per object, one edge per non-identity morphism; nodes and
    edges are sorted by their labels so the output does not depend on
    construction order."""
    labels = sorted((summarize(a), a) for a in cat.objects)
    node = {a: f"n{i}" for i, (_, a) in enumerate(labels)}
    lines = [f"digraph {_quote(name)} {{"]
    lines += [f"    {node[a]} [label={_quote(s)}];" for s, a in labels]
    edges = []
    for (a, b), hs in cat.homs.items():
        ident = cat.identity(a) if a == b else None
        edges += [(node[a], node[b], summarize(h)) for h in hs if h != ident]
    edges.sort(key=lambda e: (int(e[0][1:]), int(e[1][1:]), e[2]))
    lines += [f"    {s} -> {t} [label={_quote(lab)}];" for s, t, lab in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(cat: FinCategory, path: str | Path, name: str = "C") -> None:
    Path(path).write_text(render_dot(cat, name), encoding="utf-8")


# -- commands ---------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nablaops", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a named suite and print one CHECK line per check")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--operad", default="symmetric")
    v.add_argument("--n-max", type=int, default=None)
    v.add_argument("--multicat", type=Path)
    v.add_argument("--monoid", type=Path)
    b = sub.add_parser("build", help="build a category and write it as DOT")
    b.add_argument("what", choices=["wreath"])
    b.add_argument("--multicat", type=Path, required=True)
    b.add_argument("--operad", default="symmetric")
    b.add_argument("--variant", choices=list(VARIANTS), default="tildeE")
    b.add_argument("--n-max", type=int, required=True)
    b.add_argument("--dot", type=Path, required=True)
    return p


def _operad(name: str, n: int) -> GroupOperad:
    try:
        return builtin_operad(name, n + 2)
    except ValueError as exc:
        raise DefinitionError(str(exc), field="--operad") from None


def _check_jobs() -> None:
    raw = os.environ.get("NABLA_OPS_JOBS")
    if raw is not None and (not raw.isdigit() or int(raw) < 1):
        raise DefinitionError("NABLA_OPS_JOBS must be a positive integer", field="environment")


def _verify(args) -> int:
    n = 4 if args.n_max is None else args.n_max
    if n < 0:
        raise DefinitionError("must be non-negative", field="--n-max")
    G = _operad(args.operad, n)
    multicat = monoid = None
    if args.multicat is not None:
        A = parse_definitions(args.multicat, G)
        if not isinstance(A, GSymAction):
            raise DefinitionError("expected a multicategory definition", args.multicat)
        multicat = (A.multicat, A)
    if args.monoid is not None:
        monoid = parse_definitions(args.monoid, G)
        if not isinstance(monoid, FinMonoid):
            raise DefinitionError("expected a monoid definition", args.monoid)
    rep = run_suite(SuiteConfig(args.suite, args.operad, args.n_max, multicat, monoid))
    sys.stdout.write("".join(line + "\n" for line in rep.lines()))
    sys.stdout.flush()
    return EXIT_OK if rep.passed else EXIT_FAIL


def _build(args) -> int:
    if args.n_max < 0:
        raise DefinitionError("must be non-negative", field="--n-max")
    G = _operad(args.operad, args.n_max)
    A = parse_definitions(args.multicat, G)
    if not isinstance(A, GSymAction):
        raise DefinitionError("expected a multicategory definition", args.multicat)
    M = A.multicat
    if M.arity_bound < args.n_max:
        raise DefinitionError(f"arities only reach {M.arity_bound}", args.multicat, "--n-max")
    W = wreath(M, G, VARIANTS[args.variant], args.n_max)
    export_dot(W.cat, args.dot, f"{M.name}_{args.variant}")
    print(f"objects={len(W.cat.objects)} morphisms={W.cat.n_morphisms} dot={args.dot}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _check_jobs()
        return _verify(args) if args.command == "verify" else _build(args)
    except DefinitionError as exc:
        msg = f"error: {exc}"
        if exc.witness is not None:
            msg += f" witness={exc.witness!r}"
        print(msg, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
