"""Mesh construction for the singular double integrals of the Langevin module.

The rectangle [0,a] x [0,b] is split along the diagonal x = y and each
triangle is parametrised by s = |x - y|, which carries the kernel's
|x - y|^sigma singularity explicitly:

    I(a, b) = A(a, b) + A(b, a),
    A(a, b) = int_0^a ds int_0^{min(b, a-s)} f(s, y) dy,

with f(s, y) the kernel evaluated at (x, y) = (y + s, y).  The s-axis is
geometrically refined toward the singular line s = 0 and finished with a
Gauss-Jacobi cell that integrates the s^sigma weight exactly; on that closing
cell the kernel's regular component is integrated by a plain Gauss rule
instead (the two components are evaluated separately by the backend).  Inner
y-integrals are geometrically refined toward y = 0 with a Gauss-Jacobi
closing cell for the y^beta endpoint weight.

A mesh is a set of weighted node groups; the integral is the sum over groups
of dot(weights, component(s, y)).  Group components: "full" = whole kernel,
"sing" = coefficient of s^sigma (weights carry the s^sigma factor),
"reg" = kernel minus its singular term.
"""

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

GAUSS_N = 10
_GL_X, _GL_W = roots_legendre(GAUSS_N)
_JACOBI_CACHE = {}

# geometric depth toward the far (s = a) end where the inner range vanishes
_J_FAR = 24
_J_IN_MIN = 14
_J_IN_CAP = 30


def _jacobi_rule(expo):
    rule = _JACOBI_CACHE.get(expo)
    if rule is None:
        rule = roots_jacobi(GAUSS_N, 0.0, expo)
        _JACOBI_CACHE[expo] = rule
    return rule


def _unit_graded(J, splits):
    """Composite Gauss nodes/weights on (2^-J, 1], refined toward 0."""
    base = np.power(0.5, np.arange(J, -1, -1.0))
    edges = [base[0]]
    for j in range(len(base) - 1):
        edges.extend(np.linspace(base[j], base[j + 1], splits + 1)[1:])
    e = np.asarray(edges)
    lo, hi = e[:-1], e[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    wts = (half[:, None] * np.broadcast_to(_GL_W, (lo.size, GAUSS_N))).ravel()
    return pts, wts


class RegionMesh:
    """Weighted node groups for one triangle integral A(a, b)."""

    def __init__(self, a, b, sigma, beta, J_out, splits):
        self._beta = beta
        self._splits = splits
        self.groups = {"full": [], "sing": [], "reg": []}

        hi = min(a - b, a) if b < a else 0.5 * a  # extent of the piece touching s=0
        if b < a:
            y_top = lambda s: np.full_like(s, b)
        else:
            y_top = lambda s: a - s

        # piece 1: s in (0, hi], graded toward the singular line
        sp, sw = _unit_graded(J_out, splits)
        self._add("full", hi * sp, hi * sw, y_top)
        eps = hi * 2.0 ** (-float(J_out))
        xj, wj = _jacobi_rule(sigma)
        s_sing = eps * (1.0 + xj) / 2.0
        w_sing = wj * (eps / 2.0) ** (sigma + 1.0)
        self._add("sing", s_sing, w_sing, y_top)
        s_reg = eps * (1.0 + _GL_X) / 2.0
        w_reg = _GL_W * eps / 2.0
        self._add("reg", s_reg, w_reg, y_top)

        # piece 2: s in (hi, a], inner range a-s shrinking; graded toward s=a
        span = a - hi
        sp2, sw2 = _unit_graded(_J_FAR, splits)
        s2 = a - span * sp2[::-1]
        w2 = span * sw2[::-1]
        self._add("full", s2, w2, lambda s: a - s)
        eps2 = span * 2.0 ** (-float(_J_FAR))
        s3 = (a - eps2) + eps2 * (1.0 + _GL_X) / 2.0
        w3 = _GL_W * eps2 / 2.0
        self._add("full", s3, w3, lambda s: a - s)

        for tag, blocks in self.groups.items():
            if blocks:
                self.groups[tag] = tuple(
                    np.concatenate(cols) for cols in zip(*blocks))
            else:
                self.groups[tag] = (np.empty(0), np.empty(0), np.empty(0))
        self.npoints = sum(g[0].size for g in self.groups.values())

    def _add(self, tag, s_pts, s_wts, y_top):
        """Attach the inner y-meshes for a set of outer s nodes."""
        beta, splits = self._beta, self._splits
        Y = y_top(s_pts)
        keep = Y > 0.0
        s_pts, s_wts, Y = s_pts[keep], s_wts[keep], Y[keep]
        if s_pts.size == 0:
            return
        # refine deep enough to resolve the kernel's y ~ s boundary layer
        depth = np.ceil(
            np.log2(Y / np.maximum(np.minimum(s_pts, Y), Y * 2.0 ** -26)) + 4.0)
        J_in = np.clip(depth, _J_IN_MIN, _J_IN_CAP).astype(int)
        xj, wj = _jacobi_rule(beta)
        out = self.groups[tag]
        for J in np.unique(J_in):
            sel = J_in == J
            su, wu, Yu = s_pts[sel], s_wts[sel], Y[sel]
            gp, gw = _unit_graded(int(J), splits)
            y = Yu[:, None] * gp[None, :]
            w = (Yu * wu)[:, None] * gw[None, :]
            out.append((np.repeat(su, gp.size), y.ravel(), w.ravel()))
            eps = Yu * 2.0 ** (-float(J))
            yc = eps[:, None] * (1.0 + xj[None, :]) / 2.0
            wc = (wu[:, None] * (eps[:, None] / 2.0) ** (beta + 1.0)
                  * wj[None, :] * np.power(yc, -beta))
            out.append((np.repeat(su, GAUSS_N), yc.ravel(), wc.ravel()))

    def integrate(self, component_funcs):
        """Sum dot(w, f(s, y)) over node groups.

        component_funcs: mapping tag -> f(s, y) array function."""
        total = 0.0
        for tag, (s, y, w) in self.groups.items():
            if s.size:
                total += float(np.dot(w, component_funcs[tag](s, y)))
        return total
