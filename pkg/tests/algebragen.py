"""Adversarial derivation tables for the algebra-model tests."""

from reebgap.certified import compare
from reebgap.chmodel import AlgebraElement, random_image_monomial


def adversarial_images(model, rng, max_rank=12):
    """One generator image that is either wrongly graded or raises action.

    Returns (images, kind) with kind in {"grading", "action"}.
    """
    for _ in range(1000):
        k = rng.randint(1, max_rank)
        if rng.random() < 0.5:
            # grading off by a nonzero even amount
            shift = rng.choice([-2, 2, 4])
            m = random_image_monomial(model, k + shift // 2, rng)
            if m is None or model.grading(m) == model.grading(k) - model.degree_drop:
                continue
            return {k: AlgebraElement.monomial(m, rng.randint(1, 5))}, "grading"
        m = random_image_monomial(model, k, rng, max_len=4)
        if m is None or compare(model.action(m), model.generator_action(k)) <= 0:
            continue
        return {k: AlgebraElement.monomial(m)}, "action"
    raise RuntimeError("no adversarial case found")
