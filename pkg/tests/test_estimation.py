import math

import numpy as np
import pytest

from conformal_cauchy.errors import DomainError
from conformal_cauchy.estimation import (
    ContourCircle,
    ContourLine,
    Estimate,
    MleConfig,
    PointMass,
    SphereEstimate,
    hessian_tilde,
    likelihood_residual,
    loglik_euclid,
    loglik_sphere,
    mle_closed,
    mle_numeric,
    mle_sphere,
    profile_sigma,
    stationary_diagnostics,
)
from conformal_cauchy.geometry import ExtendedComplexParam, random_rotation
from conformal_cauchy.moebius import MoebiusChain, MoebiusMap
from conformal_cauchy.oracle import numeric_argmax
from conformal_cauchy.sampling import sample_euclid_cauchy, sample_sphere_cauchy

T = ExtendedComplexParam
TRIPLE = np.array([[-1.0], [0.0], [1.0]])


def neg_loglik(X):
    d = X.shape[1]
    return lambda p: -loglik_euclid(T(p[:d], abs(p[d])), X) if p[d] != 0 else np.inf


# ---- log-likelihood


def test_loglik_examples():
    x1 = np.array([[0.3, -0.2]])
    vals = [loglik_euclid(T(x1[0], s), x1) for s in (1.0, 1e-2, 1e-4)]
    assert vals[0] < vals[1] < vals[2]
    assert loglik_euclid(T(np.zeros(1), 1 / math.sqrt(3)), TRIPLE) > loglik_euclid(T(np.zeros(1), 1.0), TRIPLE)
    rng = np.random.default_rng(0)
    X, mu, a = rng.normal(size=(7, 2)), rng.normal(size=2), rng.normal(size=2)
    assert loglik_euclid(T(mu + a, 0.8), X + a) == pytest.approx(loglik_euclid(T(mu, 0.8), X), rel=1e-13)
    with pytest.raises(DomainError):
        loglik_euclid(T(np.zeros(1), 0.0), TRIPLE)


def test_loglik_matches_scipy_cauchy():
    from scipy.stats import cauchy

    x = np.array([-2.0, 0.1, 0.5, 3.0])
    assert loglik_euclid(T(np.array([0.2]), 1.3), x[:, None]) == pytest.approx(cauchy(0.2, 1.3).logpdf(x).sum(), rel=1e-14)


def test_loglik_sphere_matches_transport():
    from conformal_cauchy.densities import SphericalCauchy, log_pdf_sphere

    phi = np.array([0.2, -0.3, 0.4])
    Y = sample_sphere_cauchy(phi, 2, 20, 1)
    assert loglik_sphere(phi, Y) == pytest.approx(np.sum(log_pdf_sphere(SphericalCauchy(phi), Y)), rel=1e-13)


# ---- closed forms


def test_mle_closed_examples():
    r = mle_closed(TRIPLE)
    assert isinstance(r, Estimate)
    assert abs(r.theta.mu[0]) < 1e-15
    assert r.theta.sigma == pytest.approx(1 / math.sqrt(3), rel=1e-15)
    c = mle_closed(np.array([[-1.0], [1.0]]))
    assert isinstance(c, ContourCircle)
    np.testing.assert_array_equal(c.center, [0.0, 0.0])
    assert c.radius == 1.0
    assert isinstance(mle_closed(np.array([[2.0, 1.0]])), PointMass)
    p = mle_closed(np.array([[0.5], [0.5]]))
    assert isinstance(p, PointMass) and p.location[0] == 0.5
    p = mle_closed(np.array([[0.5], [0.5], [3.0]]))
    assert isinstance(p, PointMass) and p.location[0] == 0.5
    with pytest.raises(DomainError):
        mle_closed(np.zeros((4, 1)))


def test_mle_closed_vs_argmax():
    rng = np.random.default_rng(1)
    for d in (1, 2, 3):
        for k in range(5):
            X = rng.normal(size=(3, d))
            r = mle_closed(X)
            start = np.append(np.median(X, axis=0), 1.0)
            best = numeric_argmax(lambda p: -neg_loglik(X)(p), start, seed=k)
            np.testing.assert_allclose(np.append(r.theta.mu, r.theta.sigma), np.append(best.x[:d], abs(best.x[d])),
                                       atol=1e-5)


def test_n2_contour_constant_and_maximal():
    X = np.array([[0.3, -1.0], [1.5, 0.7]])
    c = mle_closed(X)
    vals = []
    for t in np.linspace(0.05, np.pi - 0.05, 15):
        p = c.point(t)
        vals.append(loglik_euclid(T(p[:2], p[2]), X))
    assert np.ptp(vals) < 1e-9
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = c.point(rng.uniform(0.1, np.pi - 0.1)) + rng.normal(scale=0.1, size=3)
        assert loglik_euclid(T(p[:2], abs(p[2])), X) < vals[0]


# ---- residual, diagnostics, profile


def test_residual_examples():
    assert np.linalg.norm(likelihood_residual(T(np.zeros(1), 1 / math.sqrt(3)), TRIPLE)) < 1e-12
    rng = np.random.default_rng(3)
    half = rng.normal(size=(4, 2))
    X = np.vstack([half, -half])
    assert np.all(np.abs(likelihood_residual(T(np.zeros(2), 0.9), X)[:2]) < 1e-14)
    base = np.linalg.norm(likelihood_residual(T(np.zeros(1), 1 / math.sqrt(3)), TRIPLE))
    for eps in (1e-3, 1e-2):
        assert np.linalg.norm(likelihood_residual(T(np.array([eps]), 1 / math.sqrt(3)), TRIPLE)) > base + eps / 10


def test_residual_equals_gradient_conditions():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(9, 2))
    theta = T(np.array([0.1, 0.2]), 0.7)
    s = likelihood_residual(theta, X)
    xb = X - theta.mu
    q = theta.sigma**2 + np.sum(xb**2, axis=1)
    np.testing.assert_allclose(s[:2], 2 * theta.sigma * np.sum(xb / q[:, None], axis=0), rtol=1e-13)
    assert s[2] == pytest.approx(len(X) - 2 * np.sum(theta.sigma**2 / q), rel=1e-13)


def test_diagnostics_at_closed_form():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(3, 2))
    r = mle_closed(X)
    d = stationary_diagnostics(r.theta, X)
    assert abs(d.grad_mu_residual) < 1e-10 and abs(d.grad_sigma_residual) < 1e-10
    assert d.hessian_max_eigenvalue < 0
    assert not d.coincidence_flag
    assert stationary_diagnostics(T(np.zeros(1), 1.0), np.array([[0.0], [0.0], [1.0], [2.0]])).coincidence_flag


def test_hessian_matches_fd():
    rng = np.random.default_rng(6)
    for d in (1, 2, 3):
        X = rng.standard_cauchy(size=(12, d))
        theta = T(rng.normal(size=d), 0.8)
        H = hessian_tilde(theta, X)
        p0 = np.append(theta.mu, theta.sigma)
        f = lambda p: loglik_euclid(T(p[:d], p[d]), X) / d
        h = 1e-4
        Hfd = np.empty((d + 1, d + 1))
        E = np.eye(d + 1) * h
        for i in range(d + 1):
            for j in range(d + 1):
                Hfd[i, j] = (f(p0 + E[i] + E[j]) - f(p0 + E[i] - E[j]) - f(p0 - E[i] + E[j]) + f(p0 - E[i] - E[j])) / (4 * h * h)
        np.testing.assert_allclose(H, Hfd, atol=1e-5 * max(1.0, np.abs(H).max()))


def test_sigma_curvature_negative_on_a2():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(10, 2))
    for _ in range(5):
        mu = rng.normal(size=2)
        p = profile_sigma(mu, X)
        assert hessian_tilde(T(mu, p.sigma), X)[-1, -1] < 0


def test_profile_examples():
    p = profile_sigma(np.zeros(1), np.array([[-1.0], [1.0]]))
    assert p.sigma == pytest.approx(1.0, rel=1e-12)
    rng = np.random.default_rng(8)
    X = rng.standard_cauchy(size=(15, 2))
    mu = np.median(X, axis=0)
    p = profile_sigma(mu, X)
    assert abs(stationary_diagnostics(T(mu, p.sigma), X).grad_sigma_residual) < 1e-10
    assert p.lam == pytest.approx(loglik_euclid(T(mu, p.sigma), X), rel=1e-14)
    b = profile_sigma(np.zeros(1), np.array([[0.0], [0.0], [1.0]]))
    assert b.boundary


def test_profile_unimodal_scan():
    rng = np.random.default_rng(9)
    X = sample_euclid_cauchy(T(np.zeros(2), 1.0), 2, 30, 9)
    r = mle_numeric(X, 2)
    u = rng.normal(size=2)
    u /= np.linalg.norm(u)
    t = np.linspace(-3, 3, 200)
    lam = np.array([profile_sigma(r.theta.mu + s * u, X).lam for s in t])
    inner = (lam[1:-1] > lam[:-2]) & (lam[1:-1] > lam[2:])
    assert inner.sum() == 1


# ---- numeric MLE


def test_numeric_examples():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(3, 2))
    a, b = mle_numeric(X), mle_closed(X)
    np.testing.assert_allclose(np.append(a.theta.mu, a.theta.sigma), np.append(b.theta.mu, b.theta.sigma), atol=1e-8)
    p = np.array([1.0, 2.0])
    r = mle_numeric(np.array([p, p, p, [0.0, 0.0]]))
    assert isinstance(r, PointMass)
    np.testing.assert_array_equal(r.location, p)
    # at n=50 the error norm is typically 0.2, so allow roughly 3 standard errors
    X = sample_euclid_cauchy(T(np.zeros(2), 1.0), 2, 50, 10)
    r = mle_numeric(X)
    assert np.linalg.norm(np.append(r.theta.mu, r.theta.sigma - 1.0)) < 0.5
    r = mle_numeric(sample_euclid_cauchy(T(np.zeros(2), 1.0), 2, 5000, 10))
    assert np.linalg.norm(np.append(r.theta.mu, r.theta.sigma - 1.0)) < 0.06


def test_numeric_half_half_contour():
    X = np.array([[0.0], [0.0], [2.0], [2.0]])
    c = mle_numeric(X)
    assert isinstance(c, ContourCircle)
    np.testing.assert_allclose(c.center, [1.0, 0.0])
    assert c.radius == pytest.approx(1.0)


def test_numeric_diagnostics_pass():
    rng = np.random.default_rng(11)
    for n, d in [(5, 1), (10, 2), (50, 2)]:
        X = rng.standard_cauchy(size=(n, d))
        r = mle_numeric(X, d)
        assert isinstance(r, Estimate) and r.converged
        dg = r.diagnostics
        assert abs(dg.grad_mu_residual) < 1e-8 and abs(dg.grad_sigma_residual) < 1e-8
        assert dg.hessian_max_eigenvalue < 0


def test_numeric_budget_exhaustion_flag():
    X = np.random.default_rng(12).standard_cauchy(size=(40, 2))
    r = mle_numeric(X, 2, MleConfig(max_evals=5, newton_steps=0))
    assert isinstance(r, Estimate) and not r.converged


def test_equivariance():
    rng = np.random.default_rng(13)
    for n in (3, 10):
        X = rng.normal(size=(n, 2))
        chain = MoebiusChain((
            MoebiusMap(random_rotation(2, n).matrix, 1.7, rng.normal(size=2), rng.normal(size=2), 2),
            MoebiusMap(np.eye(2), 0.6, rng.normal(size=2), np.zeros(2), 0),
        ))
        lhs = mle_numeric(chain.apply_array(X), 2).theta
        rhs = chain.apply_param(mle_numeric(X, 2).theta)
        np.testing.assert_allclose(np.append(lhs.mu, lhs.sigma), np.append(rhs.mu, rhs.sigma), atol=1e-6)


def test_n4_residual_vanishes():
    X = np.random.default_rng(14).normal(size=(4, 1))
    r = mle_numeric(X, 1)
    assert np.linalg.norm(likelihood_residual(r.theta, X)) < 1e-9


# ---- sphere


def test_mle_sphere_examples():
    y = np.array([0.6, 0.0, 0.8])
    r = mle_sphere(y[None, :])
    assert isinstance(r, PointMass)
    np.testing.assert_array_equal(r.location, y)
    r = mle_sphere(np.array([y, y]))
    assert isinstance(r, PointMass)
    np.testing.assert_array_equal(r.location, y)
    with pytest.raises(DomainError):
        mle_sphere(np.array([[1.0, 1.0, 0.0]]))


def test_mle_sphere_consistency():
    phi = np.array([0.6, 0.0, 0.0])
    # at n=100 the error norm is itself about 0.05, so allow roughly 3 standard errors
    r = mle_sphere(sample_sphere_cauchy(phi, 2, 100, 15))
    assert isinstance(r, SphereEstimate)
    assert np.linalg.norm(r.phi - phi) < 0.1
    assert np.linalg.norm(r.phi) < 1
    r = mle_sphere(sample_sphere_cauchy(phi, 2, 10_000, 16))
    assert np.linalg.norm(r.phi - phi) < 0.01


def test_mle_sphere_two_point_circle():
    y0 = np.array([1.0, 0.0, 0.0])
    y1 = np.array([0.0, 1.0, 0.0])
    c = mle_sphere(np.array([y0, y1]))
    assert isinstance(c, ContourCircle)
    for t in np.linspace(0, 2 * np.pi, 7):
        p = c.point(t)
        assert np.linalg.norm(p - c.center) == pytest.approx(c.radius)
    assert c.center @ c.center == pytest.approx(1 + c.radius**2)  # orthogonal to the unit sphere
    for y in (y0, y1):
        assert np.linalg.norm(y - c.center) == pytest.approx(c.radius)
    # the sphere log-likelihood is constant along the arc inside the ball
    vals = [loglik_sphere(c.point(t), np.array([y0, y1])) for t in np.linspace(0, 2 * np.pi, 40)
            if np.linalg.norm(c.point(t)) < 1]
    assert len(vals) >= 2 and np.ptp(vals) < 1e-9
    line = mle_sphere(np.array([y0, -y0]))
    assert isinstance(line, ContourLine)
