import math

from hypothesis import given, strategies as st

from labelqm.quaternion import I, J, K, ONE, Quaternion

small = st.floats(-10, 10, allow_nan=False)
quats = st.builds(Quaternion, small, small, small, small)


def close(p, q, tol=1e-9):
    return all(abs(a - b) <= tol * (1 + abs(a) + abs(b)) for a, b in zip(p.as_tuple(), q.as_tuple()))


def test_units():
    for u in (I, J, K):
        assert u * u == -ONE
    assert I * J * K == -ONE
    assert I * J == K and J * K == I and K * I == J
    assert J * I == -K


@given(quats, quats, quats)
def test_associative(a, b, c):
    assert close((a * b) * c, a * (b * c), 1e-9)


@given(quats, quats)
def test_norm_multiplicative(a, b):
    assert math.isclose((a * b).norm(), a.norm() * b.norm(), rel_tol=1e-12, abs_tol=1e-12)


@given(quats, quats)
def test_conjugate_reverses(a, b):
    assert close((a * b).conjugate(), b.conjugate() * a.conjugate())


@given(quats)
def test_norm_and_conjugate(q):
    assert math.isclose(q.norm2(), q.w**2 + q.x**2 + q.y**2 + q.z**2)
    p = q * q.conjugate()
    assert math.isclose(p.w, q.norm2(), rel_tol=1e-12, abs_tol=1e-12)
    assert max(abs(p.x), abs(p.y), abs(p.z)) < 1e-9


@given(quats, quats, quats)
def test_distributive(a, b, c):
    assert close(a * (b + c), a * b + a * c)


@given(st.tuples(small, small, small), st.tuples(small, small, small))
def test_pure_product(u, v):
    # pure quaternions: uv = -u.v + u x v
    p = Quaternion.pure(u) * Quaternion.pure(v)
    dot = sum(a * b for a, b in zip(u, v))
    cross = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    assert close(p, Quaternion(-dot, *cross))
