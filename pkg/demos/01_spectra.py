"""Weight classes of short words in each language family, checked against enumeration."""

from wordcollector import LanguageModel, enumerate_words, spectrum, spectrum_from_words

models = {
    "two letters, b heavier": LanguageModel.sigma_star({"a": 1.0, "b": 1.5}),
    "Motzkin, pairs heavy": LanguageModel.motzkin(a=1.2, abar=1.5, b=1.0),
    "RNA, theta=3": LanguageModel.rna(a=1.2, abar=1.5, b=1.0, theta=3),
    "non-connected brackets": LanguageModel.non_connected(a=1.0, abar=2.0, b=1.0),
}

n = 8
for name, model in models.items():
    sp = spectrum(model, n)
    brute = spectrum_from_words(enumerate_words(model, n), model.assignment, n)
    same = [(c.key.counts, c.multiplicity) for c in sp.classes] == [
        (c.key.counts, c.multiplicity) for c in brute.classes
    ]
    print(f"{name}: n={n}, {len(sp)} classes, m={sp.m}, matches enumeration: {same}")
    for c in sp.classes:
        print(f"    counts={c.key.counts}  weight={c.weight:.6g}  words={c.multiplicity}")
