#!/usr/bin/env python3
"""Extract the WALS-sourced slice of the URIEL feature database into the
flat CSV layout read by `universals preprocess`.

URIEL ships inside the lang2vec wheel (lang2vec/data/features.npz).  Its
`data` array is languages x features x sources; source index "WALS" holds the
values URIEL derived from WALS (1 = on, 0 = off, -1 = unknown).  Only
features with at least one WALS-sourced value are written.

    pip download --no-deps lang2vec==1.1.2 -d /tmp/l2v
    python3 tools/make_uriel_wals.py /tmp/l2v/lang2vec-1.1.2-py3-none-any.whl data/uriel_wals
"""

import argparse
import csv
import io
import pathlib
import zipfile

import numpy as np

# URIEL feature name prefix/name -> WALS area.
WORD_ORDER = {
    "S_SVO", "S_SOV", "S_VSO", "S_VOS", "S_OVS", "S_OSV",
    "S_SUBJECT_BEFORE_VERB", "S_SUBJECT_AFTER_VERB",
    "S_OBJECT_AFTER_VERB", "S_OBJECT_BEFORE_VERB",
    "S_SUBJECT_BEFORE_OBJECT", "S_SUBJECT_AFTER_OBJECT",
    "S_ADPOSITION_BEFORE_NOUN", "S_ADPOSITION_AFTER_NOUN",
    "S_POSSESSOR_BEFORE_NOUN", "S_POSSESSOR_AFTER_NOUN",
    "S_ADJECTIVE_BEFORE_NOUN", "S_ADJECTIVE_AFTER_NOUN",
    "S_DEMONSTRATIVE_WORD_BEFORE_NOUN", "S_DEMONSTRATIVE_WORD_AFTER_NOUN",
    "S_DEMONSTRATIVE_PREFIX", "S_DEMONSTRATIVE_SUFFIX",
    "S_NUMERAL_BEFORE_NOUN", "S_NUMERAL_AFTER_NOUN",
    "S_RELATIVE_BEFORE_NOUN", "S_RELATIVE_AFTER_NOUN", "S_RELATIVE_AROUND_NOUN",
    "S_DEGREE_WORD_BEFORE_ADJECTIVE", "S_DEGREE_WORD_AFTER_ADJECTIVE",
    "S_POLARQ_MARK_INITIAL", "S_POLARQ_MARK_FINAL", "S_POLARQ_MARK_SECOND",
    "S_SUBORDINATOR_WORD_BEFORE_CLAUSE", "S_SUBORDINATOR_WORD_AFTER_CLAUSE",
    "S_SUBORDINATOR_SUFFIX",
    "S_NEGATIVE_WORD_BEFORE_VERB", "S_NEGATIVE_PREFIX",
    "S_NEGATIVE_WORD_AFTER_VERB", "S_NEGATIVE_SUFFIX",
    "S_NEGATIVE_WORD_BEFORE_SUBJECT", "S_NEGATIVE_WORD_AFTER_SUBJECT",
    "S_NEGATIVE_WORD_BEFORE_OBJECT", "S_NEGATIVE_WORD_AFTER_OBJECT",
    "S_NEGATIVE_WORD_INITIAL", "S_NEGATIVE_WORD_FINAL",
    "S_NEGATIVE_WORD_ADJACENT_BEFORE_VERB", "S_NEGATIVE_WORD_ADJACENT_AFTER_VERB",
    "S_VOX", "S_XVO", "S_XOV", "S_OXV", "S_OVX",
    "S_OBLIQUE_AFTER_VERB", "S_OBLIQUE_AFTER_OBJECT",
    "S_OBLIQUE_BEFORE_VERB", "S_OBLIQUE_BEFORE_OBJECT",
}
MORPHOLOGY = {
    "S_OBJECT_HEADMARK", "S_OBJECT_DEPMARK",
    "S_POSSESSIVE_HEADMARK", "S_POSSESSIVE_DEPMARK",
    "S_TEND_HEADMARK", "S_TEND_DEPMARK",
    "S_TEND_PREFIX", "S_TEND_SUFFIX", "S_ANY_REDUP",
}
NOMINAL_CATEGORIES = {
    "S_GENDER_MARK", "S_SEX_MARK",
    "S_DEFINITE_AFFIX", "S_DEFINITE_WORD",
    "S_INDEFINITE_AFFIX", "S_INDEFINITE_WORD",
    "S_POSSESSIVE_PREFIX", "S_POSSESSIVE_SUFFIX",
    "S_PLURAL_PREFIX", "S_PLURAL_SUFFIX", "S_PLURAL_WORD",
    "S_CASE_PREFIX", "S_CASE_SUFFIX", "S_CASE_PROCLITIC", "S_CASE_ENCLITIC",
    "S_CASE_MARK", "S_COMITATIVE_VS_INSTRUMENTAL_MARK", "S_NUMCLASS_MARK",
}
NOMINAL_SYNTAX = {"S_ADJECTIVE_WITHOUT_NOUN"}
VERBAL_CATEGORIES = {
    "S_PERFECTIVE_VS_IMPERFECTIVE_MARK", "S_PAST_VS_PRESENT_MARK",
    "S_FUTURE_AFFIX", "S_TAM_PREFIX", "S_TAM_SUFFIX",
}
SIMPLE_CLAUSES = {
    "S_NOMINATIVE_VS_ACCUSATIVE_MARK", "S_ERGATIVE_VS_ABSOLUTIVE_MARK",
    "S_POLARQ_WORD", "S_POLARQ_AFFIX",
    "S_PROSUBJECT_WORD", "S_PROSUBJECT_AFFIX", "S_PROSUBJECT_CLITIC",
    "S_NEGATIVE_AFFIX", "S_NEGATIVE_WORD",
}


def area_of(name):
    if name.startswith("P_"):
        return "Phonology"
    for area, members in (
        ("Word Order", WORD_ORDER),
        ("Morphology", MORPHOLOGY),
        ("Nominal Categories", NOMINAL_CATEGORIES),
        ("Nominal Syntax", NOMINAL_SYNTAX),
        ("Verbal Categories", VERBAL_CATEGORIES),
        ("Simple Clauses", SIMPLE_CLAUSES),
    ):
        if name in members:
            return area
    raise KeyError(f"no WALS area for {name}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("wheel", help="lang2vec wheel or extracted features.npz")
    ap.add_argument("out_dir")
    args = ap.parse_args()

    src = pathlib.Path(args.wheel)
    if src.suffix == ".whl":
        with zipfile.ZipFile(src) as z:
            blob = z.read("lang2vec/data/features.npz")
        npz = np.load(io.BytesIO(blob), allow_pickle=True)
    else:
        npz = np.load(src, allow_pickle=True)

    feats = [str(f) for f in npz["feats"]]
    langs = [str(l) for l in npz["langs"]]
    sources = [str(s) for s in npz["sources"]]
    wals = npz["data"][:, :, sources.index("WALS")]

    keep_feats = [i for i in range(len(feats)) if (wals[:, i] >= 0).any()]
    keep_langs = [r for r in range(len(langs)) if (wals[r, keep_feats] >= 0).any()]

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "features.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["language_id"] + [feats[i] for i in keep_feats])
        for r in keep_langs:
            row = [langs[r]]
            for i in keep_feats:
                v = wals[r, i]
                row.append("" if v < 0 else str(int(v)))
            w.writerow(row)
    with open(out / "categories.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_id", "category", "kind"])
        # URIEL columns are presence indicators: 0 means "absent", not a value.
        for i in keep_feats:
            w.writerow([feats[i], area_of(feats[i]), "presence"])
    print(f"{len(keep_langs)} languages x {len(keep_feats)} features -> {out}")


if __name__ == "__main__":
    main()
