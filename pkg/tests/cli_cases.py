"""Every CLI invocation exercised by the tests, with its expected exit code."""

INVOCATIONS = [
    (["props", "--theory", "group.thy", "--check", "wpb", "--span", "empty-ab-c.span"], 1),
    (["direct-image", "--theory", "monoid.thy", "--lang", "abstar.lang", "--map", "a->c,b->c",
      "--method", "powerset", "--bound", "6"], 0),
    (["case", "not_quite_malcev"], 0),
    (["free", "--theory", "semilattice", "--alphabet", "a,b,c", "--bound", "5"], 0),
    (["eq", "--theory", "group", "(dot a (inv a))", "e"], 0),
    (["eq", "--theory", "monoid", "(dot a b)", "(dot b a)"], 1),
    (["check-algebra", "--algebra", "marked_words"], 0),
    (["direct-image", "--lang", "z2_odd", "--map", "a->c,b->c", "--method", "powerset"], 1),
    (["direct-image", "--lang", "abstar", "--map", "a->c,b->c", "--method", "brute",
      "--bound", "4"], 2),
    (["props", "--theory", "semilattice", "--check", "eta", "--map", "a->c,b->c"], 1),
    (["props", "--theory", "group", "--check", "malcev"], 0),
    (["props", "--theory", "band", "--check", "locfin", "--generators", "2"], 0),
    (["--expect", "refuted", "refute", "marked_words", "--max-size", "2"], 0),
    (["case", "fgfgg", "reader", "free_lattice"], 0),
]

PARALLEL = [
    ["case", "fgfgg", "reader", "free_lattice", "not_quite_malcev"],
    ["refute", "marked_words", "not_quite_malcev", "--max-size", "2"],
]
