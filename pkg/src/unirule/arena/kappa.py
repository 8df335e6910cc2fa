"""Cohen's kappa for inter-annotator agreement over verdict labels."""

from collections import Counter

from unirule.errors import DegenerateMarginals, LengthMismatch

DEGENERACY_EPS = 1e-12


def cohens_kappa(labels_x, labels_y) -> float:
    """kappa = (p_o - p_e) / (1 - p_e) over whatever categories appear.

    Verdict sequences are typically over {a, b, tie} but any hashable
    categories work. When chance agreement p_e is exactly 1 both raters are
    constant on the same category: kappa is 1 if they agree everywhere,
    undefined otherwise.
    """
    x = list(labels_x)
    y = list(labels_y)
    if len(x) != len(y):
        raise LengthMismatch(f"sequences differ in length: {len(x)} vs {len(y)}")
    if not x:
        raise LengthMismatch("empty label sequences")

    n = len(x)
    p_o = sum(1 for a, b in zip(x, y) if a == b) / n
    count_x = Counter(x)
    count_y = Counter(y)
    p_e = sum(count_x[c] * count_y.get(c, 0) for c in count_x) / (n * n)

    if p_e >= 1.0 - DEGENERACY_EPS:
        if p_o >= 1.0 - DEGENERACY_EPS:
            return 1.0
        raise DegenerateMarginals(
            "both raters constant on one category but not in full agreement"
        )
    return (p_o - p_e) / (1.0 - p_e)
