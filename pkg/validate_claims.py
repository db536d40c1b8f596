"""
Script di validazione delle proprietà del pacchetto.

Controlla:
1. Round-trip di tutte le voci del catalogo di codifiche
2. rank <= sensitività <= 2^rank sugli ipergrafi piccoli
3. decode(compile(G, T)) = G per gli automi di decomposizione
4. Oracoli incrociati sui matroidi (componenti, duale, minori)
5. Connettività e sensitività dei matroidi rappresentati
6. Round-trip dell'algebra di branchwidth
7. Validità delle codifiche sparse paving
8. Altezza delle foreste di fattorizzazione
9. Semantica di logica e trasduzioni
10. Crescita dei census

Utilizzo:
    python validate_claims.py [--seed 0] [--full]
"""

import argparse
import logging
import random
import sys
import time
from itertools import product
from typing import Callable, List

from src import algebra, encodings, matroid, monoid, width
from src.classes import (
    BINARY_TREES,
    GRAPHS_EDGE,
    HYPERGRAPHS,
    census,
    census_lower_bound,
    corpus,
    independence_violation,
    k_ary,
    k_uniform,
    string_structure,
    vocabulary,
    word_of,
)
from src.decomposition import all_decompositions
from src.errors import InvariantViolation, MSOError
from src.logic import Language
from src.matroid_encodings import decode_sparse_paving, encode_sparse_paving, non_bases, sparse_paving_violation
from src.probe import recognizability_probe
from src.structures import is_isomorphic
from src.transduction import Transduction, apply, identity_interpretation, string_duplication

CATALOG_IDS = [
    "strings-4-to-2",
    "labelled-tree-to-unlabelled:3",
    "ordered-tree-to-labelled-binary",
    "binary-to-ordered-binary",
    "laminar-to-tree",
    "tree-to-laminar",
    "structure-to-hypergraph:graphs-edge",
    "k-uniform-to-matroid:1",
    "k-uniform-to-matroid:2",
    "bipartite-to-matroid",
    "matrix-to-bipartite:2",
    "matrix-to-bipartite:3",
    "matroid-null-to-matrix:2",
    "pairs:trees",
]


class Checker:
    """Raccoglie l'esito dei controlli e stampa le righe [OK] / [!!] / [INFO]."""

    def __init__(self):
        self.failures = 0

    def check(self, ok: bool, good: str, bad: str) -> None:
        if ok:
            print(f"  [OK] {good}")
        else:
            self.failures += 1
            print(f"  [!!] {bad}")

    def info(self, text: str) -> None:
        print(f"  [INFO] {text}")

    def section(self, title: str, body: Callable[[], None]) -> None:
        print(f"\n{title}")
        start = time.perf_counter()
        try:
            body()
        except MSOError as exc:
            self.failures += 1
            print(f"  [!!] {type(exc).__name__}: {exc}")
        self.info(f"tempo {time.perf_counter() - start:.1f}s")


def random_hypergraph(rng: random.Random, n: int) -> width.Hypergraph:
    return width.Hypergraph(n, frozenset(e for e in range(1 << n) if rng.random() < 0.5))


def check_catalog(c: Checker) -> None:
    for ident in CATALOG_IDS:
        report = encodings.roundtrip_report(ident)
        c.check(report.passed, f"{ident}: {report.total} strutture",
                f"{ident}: {len(report.failures)} fallimenti su {report.total}")
    for ident in ("strings-4-to-2", "binary-to-ordered-binary"):
        item = encodings.entry(ident)
        structures = [A for A in item.corpus() if A.universe <= 4]
        report = encodings.roundtrip_report(ident, structures, use_transduction=True)
        c.check(report.passed, f"{ident} come trasduzione: {report.total} strutture",
                f"{ident} come trasduzione: {len(report.failures)} fallimenti")


def check_rank_sensitivity(c: Checker, rng: random.Random, samples: int) -> None:
    violations, checked = 0, 0
    for n in range(1, 6):
        if n <= 3:
            graphs = [width.Hypergraph(n, frozenset(e for e in range(1 << n) if family >> e & 1))
                      for family in range(1 << (1 << n))]
        else:
            graphs = [random_hypergraph(rng, n) for _ in range(samples)]
        for G in graphs:
            for side in range(1, (1 << n) - 1):
                r = width.bipartition_rank(G, side)
                try:
                    ok = r <= width.sensitivity(G, side) <= 2 ** r
                except InvariantViolation:
                    ok = False
                violations += not ok
                checked += 1
    c.check(violations == 0, f"rank <= sensitività <= 2^rank su {checked} bipartizioni",
            f"rank/sensitività: {violations} violazioni su {checked} bipartizioni")


def check_compile_decode(c: Checker, rng: random.Random, samples: int) -> None:
    failures, checked = 0, 0
    for n in range(1, 6):
        trees = list(all_decompositions(n))
        for _ in range(max(1, samples // 50)):
            G = random_hypergraph(rng, n)
            for T in trees:
                S = width.compile_decomposition(G, T)
                checked += 1
                if width.original_labels(S, width.decode_decomposition(S)) != G:
                    failures += 1
    trees = list(all_decompositions(7))
    for _ in range(200):
        G = random_hypergraph(rng, 7)
        S = width.compile_decomposition(G, rng.choice(trees))
        checked += 1
        if width.original_labels(S, width.decode_decomposition(S)) != G:
            failures += 1
    c.check(failures == 0, f"decode(compile(G, T)) = G su {checked} casi", f"{failures} fallimenti su {checked}")


def _shift(x: int, removed: int) -> int:
    return x - (x > removed)


def check_matroid_oracles(c: Checker) -> None:
    corpus_ = matroid.represented_corpus(2, 4, 3)
    disagreements: List[str] = []
    for M in corpus_:
        G = matroid.to_general(M)
        if matroid.connected_components(M) != matroid.separation_components(M):
            disagreements.append(f"componenti {M.to_json()}")
        if matroid.dual(matroid.dual(M)) != G:
            disagreements.append(f"duale {M.to_json()}")
        for mask in range(1, (1 << M.size) - 1):
            X = [x for x in range(M.size) if mask >> x & 1]
            if matroid.contract_via_dual(M, X) != matroid.contract_via_extension(M, X):
                disagreements.append(f"contrazione {X} {M.to_json()}")
        if M.size < 3:
            continue
        for x in range(M.size):
            for y in range(M.size):
                if x == y:
                    continue
                a = matroid.contract(matroid.delete(M, [x]), [_shift(y, x)])
                b = matroid.delete(matroid.contract(M, [y]), [_shift(x, y)])
                if matroid.to_general(a) != matroid.to_general(b):
                    disagreements.append(f"cancella {x} / contrai {y} {M.to_json()}")
    c.check(not disagreements, f"{len(corpus_)} matroidi su GF(2), nessun disaccordo",
            f"{len(disagreements)} disaccordi, primo: {disagreements[:1]}")


def check_connectivity(c: Checker, full: bool) -> None:
    gf2 = matroid.represented_corpus(2, 5, 3)
    gf3 = matroid.represented_corpus(3, 4 if full else 3, 2)
    for label, matroids in (("GF(2)", gf2), ("GF(3)", gf3)):
        for representation in width.REPRESENTATIONS:
            report = width.connectivity_sensitivity_report(matroids, representation)
            name = f"{label} {representation}"
            c.check(report["lower_violations"] == 0, f"{name}: connettività <= sensitività ({report['checked']} lati)",
                    f"{name}: {report['lower_violations']} violazioni di connettività <= sensitività")
            if representation == "null" and label == "GF(2)":
                c.check(report["upper_violations"] == 0, f"{name}: sensitività <= 1 + q^connettività",
                        f"{name}: {report['upper_violations']} violazioni di sensitività <= 1 + q^connettività")
            else:
                c.info(f"{name}: sensitività <= 1 + q^connettività fallisce su {report['upper_violations']} lati")
            c.info(f"{name}: disuguaglianza invertita vera su {report['displayed_holds']}, "
                   f"falsa su {report['displayed_fails']}")


def check_algebra(c: Checker, full: bool) -> None:
    failures, checked, worst = 0, 0, 0
    for M in matroid.represented_corpus(2, 5 if full else 4, 3):
        for T in all_decompositions(M.size):
            term = algebra.term_from_branch_decomposition(M, T)
            checked += 1
            if not algebra.reproduces(M, algebra.eval_term(term)):
                failures += 1
            worst = max(worst, max(algebra.subterm_sorts(term)))
    c.check(failures == 0, f"eval_term(term_from_branch_decomposition(M, T)) ≅ M su {checked} coppie",
            f"{failures} fallimenti su {checked}")
    c.info(f"sort massimo osservato: {worst}")


def check_sparse_paving(c: Checker) -> None:
    failures = 0
    checked = 0
    for k in (1, 2):
        for A in corpus(k_uniform(k), 4):
            checked += 1
            B = encode_sparse_paving(k, A)
            family = {frozenset(row[0]) for row in B.tuples("indep")}
            if sparse_paving_violation(non_bases(A)) is not None:
                failures += 1
            elif independence_violation(B.universe, family) is not None:
                failures += 1
            elif is_isomorphic(decode_sparse_paving(k, B), A) is None:
                failures += 1
    c.check(failures == 0, f"{checked} ipergrafi 1- e 2-uniformi", f"{failures} fallimenti su {checked}")


def check_factorization(c: Checker, rng: random.Random) -> None:
    failures = 0
    for _ in range(1000):
        h = monoid.random_monoid(rng)
        word = monoid.random_word(rng, h)
        tree = monoid.factorization_tree(h, word)
        if tree.validate(h) is not None or tree.height > monoid.height_bound(h.monoid) or tree.word != word:
            failures += 1
    c.check(failures == 0, "1000 parole casuali: alberi validi con altezza <= 3|M|", f"{failures} fallimenti")


def check_semantics(c: Checker) -> None:
    dup = string_duplication(2)
    failures = 0
    for n in range(1, 4):
        for word in product(range(2), repeat=n):
            (triple,) = apply(dup, string_structure(list(word), 2))
            ok = word_of(triple.output) == list(word) * 2
            ok = ok and all(triple.origin[j] == j % n for j in range(2 * n))
            failures += not ok
    c.check(failures == 0, "duplicazione w -> ww con origini corrette", f"duplicazione: {failures} fallimenti")

    identity = Transduction(BINARY_TREES, BINARY_TREES, (identity_interpretation(vocabulary(BINARY_TREES)),))
    sentence = "(exists-set X (and (forall x (in x X)) (divisible 2 X)))"
    report = recognizability_probe(identity, Language(sentence), 7, sentence)
    c.check(report.agrees, f"language_compose e pullback concordano su {len(report.rows)} alberi binari",
            f"{len(report.disagreements)} discrepanze")


def check_growth(c: Checker) -> None:
    for n in (3, 4):
        hyper = census_lower_bound(HYPERGRAPHS, n)
        ternary = census_lower_bound(k_ary(3), n)
        graphs = census(GRAPHS_EDGE, n)
        c.check(ternary > hyper > graphs,
                f"n={n}: relazioni ternarie ({ternary}) > ipergrafi ({hyper}) > grafi ({graphs})",
                f"n={n}: ordine inatteso {ternary}, {hyper}, {graphs}")
    for item in encodings.catalog():
        for row in encodings.growth_report(item.id, (1, 2, 3)):
            if "skipped" in row:
                c.info(f"{item.id} n={row['n']}: saltato ({row['skipped']})")
            else:
                c.check(row["holds"], f"{item.id} n={row['n']}: {row['input']} <= {row['output']}",
                        f"{item.id} n={row['n']}: {row['input']} > {row['output']}")


def main():
    parser = argparse.ArgumentParser(
        description="Validazione delle proprietà di msowidth",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Esempi:
  python validate_claims.py
  python validate_claims.py --seed 7 --full
        """
    )
    parser.add_argument("--seed", type=int, default=0, help="Seme per i campioni casuali (default: 0)")
    parser.add_argument("--samples", type=int, default=500, help="Ipergrafi casuali per n (default: 500)")
    parser.add_argument("--full", action="store_true", help="Corpus completi anche dove sono lenti")
    args = parser.parse_args()

    logging.basicConfig(level=logging.ERROR)
    rng = random.Random(args.seed)
    c = Checker()

    print("=" * 60)
    print("VALIDAZIONE msowidth")
    print("=" * 60)

    c.section("1. Round-trip del catalogo:", lambda: check_catalog(c))
    c.section("2. Rango e sensitività:", lambda: check_rank_sensitivity(c, rng, args.samples))
    c.section("3. Compilazione e decodifica:", lambda: check_compile_decode(c, rng, args.samples))
    c.section("4. Oracoli sui matroidi:", lambda: check_matroid_oracles(c))
    c.section("5. Connettività e sensitività:", lambda: check_connectivity(c, args.full))
    c.section("6. Algebra di branchwidth:", lambda: check_algebra(c, args.full))
    c.section("7. Sparse paving:", lambda: check_sparse_paving(c))
    c.section("8. Foreste di fattorizzazione:", lambda: check_factorization(c, rng))
    c.section("9. Logica e trasduzioni:", lambda: check_semantics(c))
    c.section("10. Crescita dei census:", lambda: check_growth(c))

    print("\n" + "=" * 60)
    if c.failures:
        print(f"Controlli falliti: {c.failures}")
    else:
        print("Tutti i controlli superati")
    print("=" * 60)
    sys.exit(1 if c.failures else 0)


if __name__ == "__main__":
    main()
