import itertools

import pytest

from k0calc.errors import CharZeroUnsupported, NoEmbedding, SizeLimit
from k0calc.gf import build_field, embed_field, enumerate_field, frobenius, is_irreducible


def test_moduli():
    assert build_field(2, 2).modulus == (1, 1, 1)
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(5, 1).modulus == (0, 1)


def test_modulus_is_deterministic_and_first():
    for p, k in [(2, 3), (3, 3), (5, 2), (2, 4)]:
        F = build_field(p, k)
        assert F == build_field(p, k)
        assert is_irreducible(list(F.modulus), p)
        # nothing earlier in the ascending-from-constant enumeration is irreducible
        for tail in itertools.product(range(p), repeat=k):
            cand = tail + (1,)
            if cand == F.modulus:
                break
            assert not is_irreducible(list(cand), p)


def test_caps():
    with pytest.raises(SizeLimit):
        build_field(101, 1)
    with pytest.raises(SizeLimit):
        build_field(2, 21)
    with pytest.raises(SizeLimit):
        build_field(4, 1)
    with pytest.raises(CharZeroUnsupported):
        build_field(0, 1)


def test_enumeration():
    assert len(enumerate_field(build_field(3, 2))) == 9
    assert [e.coords for e in enumerate_field(build_field(2, 1))] == [(0,), (1,)]
    F4 = enumerate_field(build_field(2, 2))
    assert len(F4) == 4 and not F4[0] and len(set(F4)) == 4


@pytest.mark.parametrize("p,k", [(2, 1), (2, 3), (3, 2), (5, 2), (2, 9), (7, 3), (23, 2)])
def test_wilson(p, k):
    F = build_field(p, k)
    prod = F.one
    for e in F.elements():
        if e:
            prod = prod * e
    assert prod == -F.one


def test_frobenius_examples():
    F4 = build_field(2, 2)
    a = F4.generator
    assert frobenius(a) == a + F4.one
    F8 = build_field(2, 3)
    for e in F8.elements():
        assert frobenius(frobenius(frobenius(e))) == e
    F9 = build_field(3, 2)
    for c in range(3):
        assert frobenius(F9.from_int(c)) == F9.from_int(c)


@pytest.mark.parametrize("p,k", [(2, 3), (3, 2), (2, 6)])
def test_frobenius_is_a_homomorphism(p, k):
    F = build_field(p, k)
    els = F.elements()
    for a in els:
        for b in els:
            assert frobenius(a + b) == frobenius(a) + frobenius(b)
            assert frobenius(a * b) == frobenius(a) * frobenius(b)


def test_frobenius_rejects_rationals():
    with pytest.raises(CharZeroUnsupported):
        build_field(0)


def test_embeddings():
    F4, F16, F8 = build_field(2, 2), build_field(2, 4), build_field(2, 3)
    emb = embed_field(F4, F16)
    img = emb.image
    assert img * img + img + F16.one == F16.zero
    for a in F4.elements():
        for b in F4.elements():
            assert emb(a + b) == emb(a) + emb(b)
            assert emb(a * b) == emb(a) * emb(b)
    assert len({emb(a) for a in F4.elements()}) == 4
    with pytest.raises(NoEmbedding):
        embed_field(F4, F8)


def test_prime_field_inclusion():
    F5, F25 = build_field(5, 1), build_field(5, 2)
    emb = embed_field(F5, F25)
    for a in F5.elements():
        assert emb(a).coords == (a.coords[0], 0)


@pytest.mark.parametrize("src,dst", [((3, 1), (3, 3)), ((2, 3), (2, 6)), ((3, 2), (3, 4))])
def test_embedding_homomorphism(src, dst):
    S, D = build_field(*src), build_field(*dst)
    emb = embed_field(S, D)
    els = S.elements()
    for a in els:
        for b in els:
            assert emb(a * b) == emb(a) * emb(b)
            assert emb(a + b) == emb(a) + emb(b)
