"""
Interfaccia a riga di comando

Ogni sottocomando legge file JSON (o formule inline), chiama una sola
operazione della libreria e scrive il risultato su stdout come JSON
canonico. Con --pretty il JSON è indentato e racchiuso da un banner.

Codici di uscita: 0 successo, 1 errore di dominio (MSOError), 2 uso errato.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import algebra, encodings, logic, matroid, monoid, probe, structures, transduction, width
from .classes import ClassId, census, corpus, member, representatives
from .config import Budget
from .decomposition import BranchDecomposition, mask_of
from .errors import MalformedInput, MSOError

logger = logging.getLogger(__name__)

VERSION = "1.0.0"


class UsageError(Exception):
    """Argomenti coerenti per argparse ma non per il comando."""


# -- input ---------------------------------------------------------------------------------


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInput(f"File non leggibile: {path} ({exc.strerror})")


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"JSON non valido in {path}: {exc}")


def _formula_text(value: str) -> str:
    """Una formula è un file esistente oppure testo inline."""
    path = Path(value)
    if not value.lstrip().startswith("(") and path.is_file():
        return path.read_text(encoding="utf-8")
    return value


def _raw_structure(path: str) -> structures.Structure:
    return structures.Structure.from_json(_read_json(path))


def _structure(path: str) -> structures.Structure:
    """Struttura valida o MalformedInput con il nome della violazione."""
    A = _raw_structure(path)
    violation = structures.validate(A)
    if violation is not None:
        raise MalformedInput(f"Struttura non valida in {path}: {violation}")
    return A


def _matroid(path: str) -> matroid.Matroid:
    return matroid.from_json(_read_json(path))


def _represented(path: str) -> matroid.RepresentedMatroid:
    M = _matroid(path)
    if not isinstance(M, matroid.RepresentedMatroid):
        raise MalformedInput("Serve un matroide rappresentato {field, dim, vectors}")
    return M


def _hypergraph(path: str) -> width.Hypergraph:
    return width.Hypergraph.from_json(_read_json(path))


def _decomposition(path: Optional[str]) -> Optional[BranchDecomposition]:
    return BranchDecomposition.from_json(_read_json(path)) if path else None


def _int_list(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"Lista di interi non valida: '{text}'")


def _partition(text: str) -> matroid.OrderedPartition:
    """'0,1;2;3,4' -> blocchi ordinati."""
    return matroid.OrderedPartition(tuple(tuple(_int_list(block)) for block in text.split(";")))


def _require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise UsageError("Questo comando usa un corpus casuale: --seed è obbligatorio")
    return args.seed


# -- comandi struct ------------------------------------------------------------------------


def cmd_struct_validate(args, budget: Budget) -> Tuple[Dict[str, Any], int]:
    A = _raw_structure(args.file)
    violation = structures.validate(A)
    doc: Dict[str, Any] = {"valid": violation is None, "violation": violation, "universe": A.universe}
    if violation is None and args.cls:
        doc["class"] = args.cls
        doc["member"] = member(ClassId.parse(args.cls), A, budget)
    ok = violation is None and doc.get("member", True)
    return doc, 0 if ok else 1


def cmd_struct_iso(args, budget: Budget):
    a, b = _structure(args.first), _structure(args.second)
    witness = structures.is_isomorphic(a, b, budget=budget)
    return {"isomorphic": witness is not None, "witness": list(witness.mapping) if witness else None}, 0


def cmd_struct_census(args, budget: Budget):
    c = ClassId.parse(args.cls)
    doc: Dict[str, Any] = {"class": str(c), "n": args.n, "count": census(c, args.n, budget)}
    if args.list:
        doc["representatives"] = [A.to_json() for A in representatives(c, args.n, budget)]
    return doc, 0


def cmd_struct_pair(args, budget: Budget):
    return structures.pair(_structure(args.first), _structure(args.second)).to_json(), 0


# -- comandi logic -------------------------------------------------------------------------


def cmd_logic_eval(args, budget: Budget):
    phi = logic.parse(_formula_text(args.formula))
    A = _structure(args.file)
    try:
        valuation = logic.parse_valuation(json.loads(args.valuation)) if args.valuation else None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--valuation non è JSON valido: {exc}")
    doc: Dict[str, Any] = {"formula": logic.to_sexp(phi), "free_variables": sorted(logic.free_variables(phi))}
    doc["value"] = logic.evaluate(phi, A, valuation, budget)
    return doc, 0


# -- comandi trans -------------------------------------------------------------------------


def _transduction(path: str) -> transduction.Transduction:
    return transduction.from_json(_read_json(path))


def cmd_trans_apply(args, budget: Budget):
    t = _transduction(args.transduction)
    A = _structure(args.file)
    triples = transduction.apply(t, A, budget, dedup=args.dedup)
    return {
        "count": len(triples),
        "deterministic": transduction.is_deterministic(t),
        "outputs": [{"structure": r.output.to_json(), "origin": list(r.origin)} for r in triples],
    }, 0


def cmd_trans_compose(args, budget: Budget):
    return transduction.compose(_transduction(args.first), _transduction(args.second)).to_json(), 0


def cmd_trans_roundtrip(args, budget: Budget):
    enc, dec = _transduction(args.encoder), _transduction(args.decoder)
    if args.inputs:
        items = [_structure(p) for p in args.inputs]
    else:
        source = ClassId.parse(args.cls) if args.cls else enc.source
        if source is None:
            raise UsageError("Il codificatore non dichiara la classe di input: usare --class o --in")
        items = corpus(source, args.max, budget)
    report = transduction.check_encoding(enc, dec, items, budget)
    return report.to_json(), 0 if report.passed else 1


# -- comandi matroid -----------------------------------------------------------------------


def cmd_matroid_rank(args, budget: Budget):
    M = _matroid(args.file)
    subset = _int_list(args.subset) if args.subset is not None else list(range(M.size))
    return {"subset": subset, "rank": matroid.rank(M, subset), "independent": matroid.is_independent(M, subset)}, 0


def cmd_matroid_circuits(args, budget: Budget):
    return {"circuits": [list(c) for c in matroid.circuits(_matroid(args.file), budget)]}, 0


def _matroid_or_multi(path: str):
    doc = _read_json(path)
    if isinstance(doc, dict) and "members" in doc:
        return matroid.MultiMatroid(tuple(matroid.from_json(m) for m in doc["members"]))
    return matroid.from_json(doc)


def cmd_matroid_components(args, budget: Budget):
    M = _matroid_or_multi(args.file)
    if isinstance(M, matroid.MultiMatroid):
        return {"method": "multi", "components": matroid.multi_connected_components(M, budget)}, 0
    if args.method == "separations":
        found = matroid.separation_components(M, budget)
    else:
        found = matroid.connected_components(M, budget)
    return {"method": args.method, "components": found}, 0


def cmd_matroid_dual(args, budget: Budget):
    return matroid.dual(_matroid(args.file), budget).to_json(), 0


def cmd_matroid_minor(args, budget: Budget):
    M = _matroid(args.file)
    deleted, contracted = _int_list(args.delete), _int_list(args.contract)
    if args.method == "minor":
        return matroid.minor(M, deleted, contracted, budget).to_json(), 0
    if deleted:
        raise UsageError(f"--method {args.method} accetta solo --contract")
    contract = matroid.contract_via_dual if args.method == "dual" else matroid.contract_via_extension
    return contract(M, contracted, budget).to_json(), 0


def cmd_matroid_connectivity(args, budget: Budget):
    M = _matroid(args.file)
    side = _int_list(args.side)
    doc: Dict[str, Any] = {"side": side, "connectivity": matroid.connectivity(M, side)}
    if args.sensitivity:
        doc["representation"] = args.sensitivity
        doc["sensitivity"] = width.matroid_sensitivity(M, side, args.sensitivity, budget)
    return doc, 0


def cmd_matroid_branchwidth(args, budget: Budget):
    M = _matroid(args.file)
    T = _decomposition(args.decomposition)
    if T is not None:
        return {"width": matroid.decomposition_width(M, T), "decomposition": T.to_json()}, 0
    w, T = matroid.branchwidth(M, budget)
    doc: Dict[str, Any] = {"width": w, "decomposition": T.to_json()}
    if args.dot:
        doc["dot"] = T.to_dot()
    return doc, 0


def cmd_matroid_homog(args, budget: Budget):
    M = _matroid_or_multi(args.file)
    P = _partition(args.partition)
    doc = matroid.is_homogeneous(M, P, budget).to_json()
    if args.mod5:
        doc["mod5_failures"] = matroid.mod5_colour_claim(M, P, budget)
    return doc, 0


# -- comandi width -------------------------------------------------------------------------


def cmd_width_rank(args, budget: Budget):
    G = _hypergraph(args.file)
    side = _int_list(args.side)
    return {"side": side, "rank": width.bipartition_rank(G, side, budget)}, 0


def cmd_width_sensitivity(args, budget: Budget):
    G = _hypergraph(args.file)
    side = _int_list(args.side)
    doc: Dict[str, Any] = {"side": side, "sensitivity": width.sensitivity(G, side, budget)}
    if args.classes:
        colouring = width.node_colouring(G, mask_of(side), budget)
        doc["classes"] = [colouring[x] for x in sorted(colouring)]
    return doc, 0


def cmd_width_hyperrankwidth(args, budget: Budget):
    G = _hypergraph(args.file)
    T = _decomposition(args.decomposition)
    if T is not None:
        return {"width": width.decomposition_width(G, T, budget), "decomposition": T.to_json()}, 0
    w, T = width.hyper_rankwidth(G, budget)
    doc: Dict[str, Any] = {"width": w, "decomposition": T.to_json()}
    if args.dot:
        doc["dot"] = T.to_dot()
    return doc, 0


def cmd_width_compile(args, budget: Budget):
    G = _hypergraph(args.file)
    T = _decomposition(args.decomposition)
    if T is None:
        _, T = width.hyper_rankwidth(G, budget)
    return width.compile_decomposition(G, T, None, args.k, budget).to_json(), 0


def cmd_width_decode(args, budget: Budget):
    S = width.CompiledDecomposition.from_json(_read_json(args.file))
    H = width.decode_decomposition(S, budget)
    if S.vertices:
        H = width.original_labels(S, H)
    return H.to_json(), 0


# -- comandi enc ---------------------------------------------------------------------------


def cmd_enc_list(args, budget: Budget):
    return {"entries": [item.to_json() for item in encodings.catalog()]}, 0


def cmd_enc_run(args, budget: Budget):
    A = _structure(args.inputs[0]) if args.inputs else None
    if A is None:
        raise UsageError("enc run richiede --in <file>")
    if args.decode:
        return encodings.decode(args.id, A, budget).to_json(), 0
    if args.images:
        images = encodings.random_images(args.id, A, _require_seed(args), args.images)
        return {"images": [B.to_json() for B in images]}, 0
    return encodings.encode(args.id, A, budget).to_json(), 0


def cmd_enc_roundtrip(args, budget: Budget):
    item = encodings.entry(args.id)
    items = None
    if args.inputs:
        items = [_structure(p) for p in args.inputs]
    elif args.max is not None:
        items = corpus(item.input, args.max, budget)
    doc = encodings.roundtrip_report(args.id, items, budget, args.transduction, args.seed).to_json()
    doc["id"] = item.id
    if args.growth:
        doc["growth"] = encodings.growth_report(args.id, budget=budget)
    return doc, 0 if doc["ok"] else 1


# -- comandi algebra -----------------------------------------------------------------------


def cmd_algebra_eval_term(args, budget: Budget):
    term = algebra.term_from_json(_read_json(args.file))
    P = algebra.eval_term(term)
    return {"sort": algebra.sort(term), "result": P.to_json()}, 0


def cmd_algebra_compile_term(args, budget: Budget):
    M = _represented(args.file)
    T = _decomposition(args.decomposition)
    if T is None:
        _, T = matroid.branchwidth(M, budget)
    term = algebra.term_from_branch_decomposition(M, T)
    doc: Dict[str, Any] = {"term": algebra.term_to_json(term), "decomposition": T.to_json()}
    if args.check:
        doc["reproduces"] = algebra.reproduces(M, algebra.eval_term(term), budget)
        doc["profile"] = algebra.port_profile(M, T)
    return doc, 0


def cmd_algebra_factorize(args, budget: Budget):
    h = monoid.Homomorphism.from_json(_read_json(args.file))
    word = monoid.parse_word(args.word)
    tree = monoid.factorization_tree(h, word)
    return {
        "height": tree.height,
        "bound": monoid.height_bound(h.monoid),
        "valid": tree.validate(h) is None,
        "idempotents": monoid.idempotents(h.monoid),
        "tree": tree.to_json(),
    }, 0


def cmd_algebra_probe(args, budget: Budget):
    t = _transduction(args.transduction)
    if args.cls:
        t = transduction.Transduction(ClassId.parse(args.cls), t.target, t.steps)
    report = probe.recognizability_probe(t, None, args.max, _formula_text(args.sentence), budget)
    return report.to_json(), 0 if report.agrees else 1


# -- parser --------------------------------------------------------------------------------

Handler = Callable[[argparse.Namespace, Budget], Tuple[Any, int]]

COMMANDS: Dict[Tuple[str, str], Handler] = {
    ("struct", "validate"): cmd_struct_validate,
    ("struct", "iso"): cmd_struct_iso,
    ("struct", "census"): cmd_struct_census,
    ("struct", "pair"): cmd_struct_pair,
    ("logic", "eval"): cmd_logic_eval,
    ("trans", "apply"): cmd_trans_apply,
    ("trans", "compose"): cmd_trans_compose,
    ("trans", "roundtrip"): cmd_trans_roundtrip,
    ("matroid", "rank"): cmd_matroid_rank,
    ("matroid", "circuits"): cmd_matroid_circuits,
    ("matroid", "components"): cmd_matroid_components,
    ("matroid", "dual"): cmd_matroid_dual,
    ("matroid", "minor"): cmd_matroid_minor,
    ("matroid", "connectivity"): cmd_matroid_connectivity,
    ("matroid", "branchwidth"): cmd_matroid_branchwidth,
    ("matroid", "homog"): cmd_matroid_homog,
    ("width", "rank"): cmd_width_rank,
    ("width", "sensitivity"): cmd_width_sensitivity,
    ("width", "hyperrankwidth"): cmd_width_hyperrankwidth,
    ("width", "compile"): cmd_width_compile,
    ("width", "decode"): cmd_width_decode,
    ("enc", "list"): cmd_enc_list,
    ("enc", "run"): cmd_enc_run,
    ("enc", "roundtrip"): cmd_enc_roundtrip,
    ("algebra", "eval-term"): cmd_algebra_eval_term,
    ("algebra", "compile-term"): cmd_algebra_compile_term,
    ("algebra", "factorize"): cmd_algebra_factorize,
    ("algebra", "probe"): cmd_algebra_probe,
}

GROUP_HELP = {
    "struct": "Strutture: validazione, isomorfismo, census, coppie",
    "logic": "Valutazione di formule MSO con conteggio",
    "trans": "Trasduzioni MSO con origini",
    "matroid": "Matroidi rappresentati e generali",
    "width": "Ipergrafi: rango, sensitività, hyper-rankwidth, automi",
    "enc": "Catalogo di codifiche e verifica round-trip",
    "algebra": "Algebra di branchwidth e foreste di fattorizzazione",
}


def _add_arguments(group: str, name: str, p: argparse.ArgumentParser) -> None:
    if (group, name) == ("struct", "validate"):
        p.add_argument("file", help="Struttura JSON")
        p.add_argument("--class", dest="cls", help="Verifica anche l'appartenenza alla classe")
    elif (group, name) in {("struct", "iso"), ("struct", "pair")}:
        p.add_argument("first", help="Prima struttura JSON")
        p.add_argument("second", help="Seconda struttura JSON")
    elif (group, name) == ("struct", "census"):
        p.add_argument("cls", metavar="class", help="Classe (es. trees, strings:2, pairs(trees,bool))")
        p.add_argument("n", type=int, help="Dimensione massima dell'universo")
        p.add_argument("--list", action="store_true", help="Elenca i rappresentanti di dimensione n")
    elif group == "logic":
        p.add_argument("formula", help="Formula s-expression (file o testo)")
        p.add_argument("file", help="Struttura JSON")
        p.add_argument("--valuation", help='Valori delle variabili libere, es. \'{"x": 0, "X": [1, 2]}\'')
    elif (group, name) == ("trans", "apply"):
        p.add_argument("transduction", help="Trasduzione JSON")
        p.add_argument("file", help="Struttura JSON")
        p.add_argument("--dedup", choices=["origin", "iso", "none"], default="origin",
                       help="Deduplicazione degli output (default: origin)")
    elif (group, name) == ("trans", "compose"):
        p.add_argument("first", help="Trasduzione applicata per prima")
        p.add_argument("second", help="Trasduzione applicata per seconda")
    elif (group, name) == ("trans", "roundtrip"):
        p.add_argument("encoder", help="Trasduzione di codifica")
        p.add_argument("decoder", help="Trasduzione di decodifica")
        p.add_argument("--class", dest="cls", help="Classe del corpus (default: input del codificatore)")
        p.add_argument("--max", type=int, default=4, help="Dimensione massima del corpus (default: 4)")
        p.add_argument("--in", dest="inputs", nargs="+", help="Strutture esplicite al posto del corpus")
    elif group == "matroid":
        p.add_argument("file", help="Matroide JSON")
        if name == "rank":
            p.add_argument("--subset", help="Sottoinsieme, es. 0,2,3 (default: tutti)")
        elif name == "components":
            p.add_argument("--method", choices=["circuits", "separations"], default="circuits",
                           help="Unione dei circuiti o separazioni minime (default: circuits)")
        elif name == "minor":
            p.add_argument("--delete", default="", help="Elementi da cancellare, es. 0,1")
            p.add_argument("--contract", default="", help="Elementi da contrarre")
            p.add_argument("--method", choices=["minor", "dual", "extension"], default="minor",
                           help="Contrazione diretta, via duale o via estensione di base")
        elif name == "connectivity":
            p.add_argument("--side", required=True, help="Lato della separazione, es. 0,1")
            p.add_argument("--sensitivity", choices=list(width.REPRESENTATIONS),
                           help="Aggiunge la sensitività della rappresentazione scelta")
        elif name == "branchwidth":
            p.add_argument("--decomposition", help="Valuta una decomposizione data invece di ottimizzare")
            p.add_argument("--dot", action="store_true", help="Aggiunge l'export DOT")
        elif name == "homog":
            p.add_argument("--partition", required=True, help="Blocchi ordinati, es. '0,1;2;3,4'")
            p.add_argument("--mod5", action="store_true", help="Verifica anche il criterio dei colori mod 5")
    elif group == "width":
        p.add_argument("file", help="Ipergrafo JSON (o decomposizione compilata per decode)")
        if name in {"rank", "sensitivity"}:
            p.add_argument("--side", required=True, help="Lato della bipartizione, es. 0,1")
        if name == "sensitivity":
            p.add_argument("--classes", action="store_true", help="Aggiunge le classi di ogni sottoinsieme")
        if name in {"hyperrankwidth", "compile"}:
            p.add_argument("--decomposition", help="Decomposizione JSON (default: ottima)")
        if name == "hyperrankwidth":
            p.add_argument("--dot", action="store_true", help="Aggiunge l'export DOT")
        if name == "compile":
            p.add_argument("--k", type=int, help="Bit di colore (default: minimo sufficiente)")
    elif group == "enc" and name != "list":
        p.add_argument("--id", required=True, help="Voce del catalogo, es. laminar o strings-4-to-2")
        p.add_argument("--in", dest="inputs", nargs="+", help="Strutture JSON di input")
        if name == "run":
            p.add_argument("--decode", action="store_true", help="Applica la decodifica")
            p.add_argument("--images", type=int, default=0, help="Numero di immagini casuali (richiede --seed)")
        else:
            p.add_argument("--max", type=int, help="Dimensione massima del corpus esaustivo")
            p.add_argument("--transduction", action="store_true",
                           help="Usa la realizzazione come trasduzione MSO")
            p.add_argument("--growth", action="store_true", help="Aggiunge il confronto dei census")
    elif (group, name) == ("algebra", "eval-term"):
        p.add_argument("file", help="Termine JSON")
    elif (group, name) == ("algebra", "compile-term"):
        p.add_argument("file", help="Matroide rappresentato JSON")
        p.add_argument("--decomposition", help="Decomposizione JSON (default: ottima)")
        p.add_argument("--check", action="store_true", help="Valuta il termine e confronta col matroide")
    elif (group, name) == ("algebra", "factorize"):
        p.add_argument("file", help="Omomorfismo JSON {monoid, letters}")
        p.add_argument("--word", required=True, help="Parola, es. abca oppure 0,1,2,0")
    elif (group, name) == ("algebra", "probe"):
        p.add_argument("transduction", help="Trasduzione JSON (input di norma binary-trees)")
        p.add_argument("--sentence", required=True, help="Enunciato MSO sugli output (file o testo)")
        p.add_argument("--class", dest="cls", help="Sostituisce la classe di input della trasduzione")
        p.add_argument("--max", type=int, default=5, help="Numero massimo di nodi (default: 5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mso",
        description="Logica MSO, trasduzioni, larghezze e matroidi su strutture finite",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Esempi:
  python main.py struct validate ok.json
  python main.py logic eval "(exists-set X (divisible 2 X))" word.json
  python main.py width hyperrankwidth g.json --pretty
  python main.py enc roundtrip --id laminar --max 5
  python main.py algebra factorize z2.json --word abba

Budget:
  --budget subsets=14,set_quantifier=30   (oppure MSO_BUDGET=...)
        """
    )
    parser.add_argument("--version", action="version", version=f"mso {VERSION}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="JSON indentato con banner")
    common.add_argument("--seed", type=int, help="Seme per i corpus casuali")
    common.add_argument("--budget", help="Limiti 'chiave=valore,...' (sovrascrive MSO_BUDGET)")
    common.add_argument("-v", "--verbose", action="store_true", help="Log DEBUG su stderr")

    groups = parser.add_subparsers(dest="group", metavar="<gruppo>", required=True)
    subparsers: Dict[str, Any] = {}
    for group, name in COMMANDS:
        if group not in subparsers:
            gp = groups.add_parser(group, help=GROUP_HELP[group])
            subparsers[group] = gp.add_subparsers(dest="command", metavar="<comando>", required=True)
        p = subparsers[group].add_parser(name, parents=[common])
        _add_arguments(group, name, p)
        p.set_defaults(handler=COMMANDS[(group, name)])
    return parser


def _emit(doc: Any, args: argparse.Namespace) -> None:
    if args.pretty:
        print("=" * 60)
        print(f"mso {args.group} {args.command}")
        print("=" * 60)
        print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
        print("=" * 60)
    else:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False))


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        budget = Budget.from_env()
        if args.budget:
            budget = Budget.parse(args.budget, budget)
        logger.debug("mso %s %s con %s", args.group, args.command, budget)
        doc, code = args.handler(args, budget)
    except UsageError as exc:
        print(f"Errore: {exc}", file=sys.stderr)
        return 2
    except MSOError as exc:
        print(f"Errore: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(doc, args)
    return code


def main() -> None:
    sys.exit(run())
