"""Brute-force reference implementations used only by the tests.

Terms here are plain tuples: a variable is the string ``"?x"``, an
application is ``(name, arg1, ..., argn)``. Nothing in this module calls
into ``okb`` except the converters at the top and the order
constructors used by the random generators.
"""

import itertools
import random
from collections import Counter, deque

from okb import orders
from okb.terms import Fun, Var


def to_tuple(t):
    if isinstance(t, Var):
        return "?" + t.name
    return (t.name, *(to_tuple(a) for a in t.args))


def from_tuple(t):
    if isinstance(t, str):
        return Var(t[1:])
    return Fun(t[0], [from_tuple(a) for a in t[1:]])


def is_var(t):
    return isinstance(t, str)


def tvars(t):
    if is_var(t):
        return [t]
    return [v for a in t[1:] for v in tvars(a)]


def subst(t, s):
    if is_var(t):
        return s.get(t, t)
    return (t[0], *(subst(a, s) for a in t[1:]))


def tsize(t):
    return 1 if is_var(t) else 1 + sum(tsize(a) for a in t[1:])


def all_positions(t, p=()):
    yield p, t
    if not is_var(t):
        for i, a in enumerate(t[1:], 1):
            yield from all_positions(a, p + (i,))


def put(t, p, u):
    if not p:
        return u
    args = list(t[1:])
    args[p[0] - 1] = put(args[p[0] - 1], p[1:], u)
    return (t[0], *args)


def naive_match(pat, term, s=None):
    s = dict(s or {})
    if is_var(pat):
        if pat in s:
            return s if s[pat] == term else None
        s[pat] = term
        return s
    if is_var(term) or pat[0] != term[0] or len(pat) != len(term):
        return None
    for a, b in zip(pat[1:], term[1:]):
        s = naive_match(a, b, s)
        if s is None:
            return None
    return s


def naive_unify(a, b):
    """Robinson unification on tuple terms, returns an idempotent mgu or None."""
    s = {}
    work = [(a, b)]
    while work:
        x, y = work.pop()
        x, y = subst(x, s), subst(y, s)
        # fully resolve before comparing
        x, y = resolve(x, s), resolve(y, s)
        if x == y:
            continue
        if not is_var(x) and is_var(y):
            x, y = y, x
        if is_var(x):
            if x in tvars(y):
                return None
            s = {k: subst(v, {x: y}) for k, v in s.items()}
            s[x] = y
            continue
        if x[0] != y[0] or len(x) != len(y):
            return None
        work.extend(zip(x[1:], y[1:]))
    return s


def resolve(t, s):
    prev = None
    while prev != t:
        prev, t = t, subst(t, s)
    return t


# -- orders, textbook form -------------------------------------------------

def lpo_gt(prec, s, t):
    """``prec`` maps symbol -> rank (bigger = greater)."""
    if is_var(s):
        return False
    if is_var(t):
        return t in tvars(s)
    if any(si == t or lpo_gt(prec, si, t) for si in s[1:]):
        return True
    if not all(lpo_gt(prec, s, tj) for tj in t[1:]):
        return False
    if prec[s[0]] > prec[t[0]]:
        return True
    if s[0] == t[0]:
        for si, ti in zip(s[1:], t[1:]):
            if si != ti:
                return lpo_gt(prec, si, ti)
    return False


def kbo_weight(weights, w0, t):
    if is_var(t):
        return w0
    return weights.get(t[0], 0) + sum(kbo_weight(weights, w0, a) for a in t[1:])


def kbo_gt(prec, weights, w0, s, t):
    cs, ct = Counter(tvars(s)), Counter(tvars(t))
    if any(cs[x] < n for x, n in ct.items()):
        return False
    ws, wt = kbo_weight(weights, w0, s), kbo_weight(weights, w0, t)
    if ws > wt:
        return True
    if ws < wt or is_var(s):
        return False
    if is_var(t):
        # s = f^n(t) with n >= 1
        u = s
        while not is_var(u) and len(u) == 2:
            u = u[1]
        return u == t and s != t
    if prec[s[0]] != prec[t[0]]:
        return prec[s[0]] > prec[t[0]]
    for si, ti in zip(s[1:], t[1:]):
        if si != ti:
            return kbo_gt(prec, weights, w0, si, ti)
    return False


def ranks(precedence):
    n = len(precedence)
    return {f: n - i for i, f in enumerate(precedence)}


def greater_fn(order):
    """Oracle comparison matching an okb order object's parameters."""
    prec = ranks(order.precedence)
    if order.kind == "lpo":
        return lambda s, t: lpo_gt(prec, s, t)
    return lambda s, t: kbo_gt(prec, dict(order.weights), order.w0, s, t)


def enumerate_ground(sig, max_size):
    """Ground tuple terms up to ``max_size``, by brute-force recursion."""
    out = set()

    def build(budget):
        res = []
        for f, n in sig.items():
            if n == 0:
                res.append((f,))
            elif budget - 1 >= n:
                for args in itertools.product(build(budget - 1), repeat=n):
                    if 1 + sum(tsize(a) for a in args) <= budget:
                        res.append((f, *args))
        return res

    out.update(build(max_size))
    return out


# -- rewriting -------------------------------------------------------------

def ordered_steps(rules, equations, gt, consts, t):
    """All one-step ordered rewrites of ``t`` (tuple terms)."""
    out = set()
    for p, u in all_positions(t):
        for l, r in rules:
            s = naive_match(l, u)
            if s is not None:
                out.add(put(t, p, subst(r, s)))
        for a, b in equations:
            for l, r in ((a, b), (b, a)):
                s = naive_match(l, u)
                if s is None:
                    continue
                extra = sorted(set(tvars(r)) - set(tvars(l)))
                for choice in itertools.product(consts, repeat=len(extra)):
                    inst = dict(s)
                    inst.update({x: (c,) for x, c in zip(extra, choice)})
                    lhs, rhs = subst(l, inst), subst(r, inst)
                    if gt(lhs, rhs):
                        out.add(put(t, p, rhs))
    return out


def reach(rules, equations, gt, consts, t, limit=5000):
    seen = {t}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for v in ordered_steps(rules, equations, gt, consts, u):
            if v not in seen:
                seen.add(v)
                if len(seen) > limit:
                    return None
                queue.append(v)
    return seen


def brute_joinable(rules, equations, gt, consts, s, t, limit=5000):
    a = reach(rules, equations, gt, consts, s, limit)
    b = reach(rules, equations, gt, consts, t, limit)
    if a is None or b is None:
        return None
    return bool(a & b)


def rename(t, suffix):
    if is_var(t):
        return t + suffix
    return (t[0], *(rename(a, suffix) for a in t[1:]))


def classical_cps(rules):
    """Critical pairs of a TRS given as tuple pairs, excluding trivial root self-overlaps."""
    out = []
    for j, (l2, r2) in enumerate(rules):
        for i, (l1, r1) in enumerate(rules):
            l1, r1 = rename(l1, "'"), rename(r1, "'")
            for p, u in all_positions(l2):
                if is_var(u) or (i == j and not p):
                    continue
                mu = naive_unify(l1, u)
                if mu is None:
                    continue
                out.append((subst(put(l2, p, r1), mu), subst(r2, mu)))
    return out


def canonical(pair):
    """Rename variables of a tuple-term pair to ?0, ?1, ... by first occurrence."""
    names = {}
    for side in pair:
        for v in tvars(side):
            names.setdefault(v, f"?{len(names)}")
    return tuple(subst(side, names) for side in pair)


# -- random generation -----------------------------------------------------

def random_term(rng, sig, variables, max_size, ground=False):
    """Random tuple term with at most ``max_size`` symbols."""
    leaves = [(f,) for f, n in sig.items() if n == 0]
    if not ground:
        leaves += list(variables)
    funs = [(f, n) for f, n in sig.items() if n > 0 and n + 1 <= max_size]
    if max_size <= 1 or not funs or rng.random() < 0.3:
        return rng.choice(leaves)
    f, n = rng.choice(funs)
    budget = max_size - 1
    args = []
    for k in range(n):
        share = max(1, budget - (n - k - 1)) if k == n - 1 else rng.randint(1, max(1, budget - (n - k - 1)))
        args.append(random_term(rng, sig, variables, share, ground))
        budget -= tsize(args[-1])
    return (f, *args)


def random_signature(rng, max_symbols=5, max_arity=2):
    names = ["a", "b", "f", "g", "h"][:max_symbols]
    k = rng.randint(2, max_symbols)
    sig = {"a": 0}
    for name in names[1:k]:
        sig[name] = rng.randint(0, max_arity)
    return sig


def random_kbo_params(rng, sig, prec):
    """Admissible KBO weights for ``sig`` under precedence list ``prec`` (greatest first)."""
    w0 = rng.randint(1, 2)
    weights = {}
    for f, n in sig.items():
        if n == 0:
            weights[f] = rng.randint(w0, w0 + 2)
        elif n == 1 and f == prec[0]:
            weights[f] = rng.randint(0, 2)
        else:
            weights[f] = rng.randint(1 if n == 1 else 0, 2)
    return w0, weights


def random_system(rng):
    """(sig, order, gt, rules, equations) with tuple terms of size <= 6."""
    sig = random_signature(rng)
    if not any(n > 0 for n in sig.values()):
        sig["f"] = rng.randint(1, 2)
    prec = list(sig)
    rng.shuffle(prec)
    if rng.random() < 0.5:
        order = orders.Lpo(tuple(prec))
    else:
        order = orders.Kbo(tuple(prec), 1, {f: (rng.randint(1, 3) if n == 0 else rng.randint(1, 2)) for f, n in sig.items()})
    gt = greater_fn(order)
    vs = ["?x", "?y"]
    rules, eqs = [], []
    for _ in range(rng.randint(1, 5)):
        a = random_term(rng, sig, vs, 6)
        b = random_term(rng, sig, vs, 6)
        if gt(a, b) and rng.random() < 0.5:
            rules.append((a, b))
        elif gt(b, a) and rng.random() < 0.5:
            rules.append((b, a))
        else:
            eqs.append((a, b))
    return sig, order, gt, rules, eqs
