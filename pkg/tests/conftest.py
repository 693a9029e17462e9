import random

from mildkit import Context, Monomial


def random_monomial(rng: random.Random, ctx: Context, max_len=5) -> Monomial:
    letters = tuple(rng.randint(1, ctx.d) for _ in range(rng.randint(0, max_len)))
    return ctx.monomial(letters)


def random_poly(rng: random.Random, ctx: Context, max_terms=4, max_len=5):
    items = []
    for _ in range(rng.randint(0, max_terms)):
        items.append((random_monomial(rng, ctx, max_len), rng.randint(1, ctx.p - 1)))
    return ctx.poly(items)
