"""Regenerate the workspace files in samples/ from the built-in corpus."""

import json
import random
import sys

from dliecalc.corpus import (corpus_algebras, corpus_free_lrs,
                             h2_representatives, random_coboundary,
                             zero_cocycle)
from dliecalc.lierinehart import derivations_lr, trivial_coefficients, Cochain
from dliecalc.conncat import LPsiConnection, c_functor, validate_connection, validate_lpsi
from dliecalc.dliealg import functor_F, reconstruct
from dliecalc.corpus import free_rank_one_lr
from dliecalc.finalg import regular_module
from dliecalc.workspace import (algebra_json, lr_json, cocycle_json,
                                module_json, connection_json, parse_workspace)
from dliecalc.ratlin import Mat


def dual_numbers_doc():
    A = corpus_algebras()["dual"]
    der = derivations_lr(A)
    free = free_rank_one_lr(A, der.anchor[0], name="free")
    reg = regular_module(A)
    zero = zero_cocycle(der)
    T = functor_F(der)
    pair = LPsiConnection(der, reg, Mat.identity(2), [der.anchor[0]])
    assert not validate_lpsi(pair)
    conn = c_functor(pair, T=T)
    assert not validate_connection(conn)
    reconstruct(functor_F(free))
    return {
        "algebras": {"dual": algebra_json(A)},
        "lie_rinehart": {"der": lr_json(der, "dual"),
                         "free": lr_json(free, "dual")},
        "cocycles": {"zero": cocycle_json(zero, "derivations:dual")},
        "modules": {"reg": module_json(reg, "dual")},
        "connections": {"conn": connection_json("F:der", "reg", conn.rho)},
    }


def corpus_doc():
    rng = random.Random(20240901)
    algs = corpus_algebras()
    doc = {"algebras": {}, "lie_rinehart": {}, "cocycles": {},
           "modules": {}, "connections": {}}
    for tag, A in algs.items():
        doc["algebras"][tag] = algebra_json(A)
        der = derivations_lr(A)
        if der.dim:
            doc["lie_rinehart"][f"der_{tag}"] = lr_json(der, tag)
        doc["modules"][f"reg_{tag}"] = module_json(regular_module(A), tag)
    free = corpus_free_lrs()
    for tag in ("dual", "QxQ", "trunc3"):
        doc["lie_rinehart"][f"free2_{tag}"] = lr_json(free[f"{tag}/free2"], tag)
    for tag in ("dual", "QxQ"):
        doc["lie_rinehart"][f"abelian_{tag}"] = lr_json(free[f"{tag}/abelian"], tag)
    # cocycles: a coboundary at the derivations level, classes on free carriers
    der_fat = derivations_lr(algs["fatplane"])
    doc["cocycles"]["cob_fatplane"] = cocycle_json(
        random_coboundary(der_fat, rng), "derivations:fatplane")
    doc["cocycles"]["zero_fatplane"] = cocycle_json(
        zero_cocycle(der_fat), "derivations:fatplane")
    reps = h2_representatives(free["dual/free2"])
    doc["cocycles"]["class_dual"] = cocycle_json(reps[0], "free2_dual")
    doc["cocycles"]["zero_dual"] = cocycle_json(
        zero_cocycle(free["dual/free2"]), "free2_dual")
    # connections: canonical pair (psi = id, nabla = anchor) over F(Der(A))
    for tag in ("dual", "trunc3", "fatplane"):
        A = algs[tag]
        der = derivations_lr(A)
        reg = regular_module(A)
        T = functor_F(der)
        pair = LPsiConnection(der, reg, Mat.identity(A.dim), list(der.anchor))
        assert not validate_lpsi(pair)
        conn = c_functor(pair, T=T)
        assert not validate_connection(conn)
        doc["connections"][f"conn_{tag}"] = connection_json(
            f"F:der_{tag}", f"reg_{tag}", conn.rho)
    return doc


def main():
    for fname, doc in (("samples/dual_numbers.json", dual_numbers_doc()),
                       ("samples/corpus.json", corpus_doc())):
        text = json.dumps(doc, indent=2)
        parse_workspace(text)  # must round trip
        with open(fname, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {fname}")


if __name__ == "__main__":
    sys.exit(main())
