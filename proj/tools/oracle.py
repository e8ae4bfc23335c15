#!/usr/bin/env python3
"""Independent numpy evaluation of the reference values frozen in tests/.

Run: python3 tools/oracle.py
"""

import numpy as np

HBAR = 1.054571817e-34
KB = 1.380649e-23
NU = 2 * np.pi * 20e6
OMEGA_C = 2 * np.pi * 6e9
GAMMA = 0.003334


def drift(mode, g, chi, gam, mu, psi=np.pi / 4):
    m = np.diag([-mu / 2, -mu / 2, -gam / 2, -gam / 2]).astype(complex)
    m[2, 3] = -2j * chi
    m[3, 2] = 2j * np.conj(chi)
    if mode == "blue":
        m[0, 3], m[1, 2], m[2, 1], m[3, 0] = -1j * g, 1j * g, -1j * g, 1j * g
    elif mode == "red":
        m[0, 2], m[1, 3], m[2, 0], m[3, 1] = 1j * g, -1j * g, 1j * g, -1j * g
    else:
        e = np.exp(1j * psi)
        m[0, 2], m[0, 3] = -1j * g / e, -1j * g * e
        m[1, 2], m[1, 3] = 1j * g / e, 1j * g * e
        m[2, 0] = m[2, 1] = -1j * g * e
        m[3, 0] = m[3, 1] = 1j * g / e
    return m


def input_correlations(n):
    c = np.zeros((4, 4))
    c[0, 1] = 1
    c[2, 3] = n + 1
    c[3, 2] = n
    return c


def moments(m, gam, mu, n):
    d = np.diag([np.sqrt(mu)] * 2 + [np.sqrt(gam)] * 2)
    q = d @ input_correlations(n) @ d
    eye = np.eye(4)
    lhs = np.kron(eye, m) + np.kron(m, eye)
    return np.linalg.solve(lhs, -q.flatten(order="F")).reshape(4, 4, order="F")


def transfer(m, w, gam, mu):
    d = np.diag([np.sqrt(mu)] * 2 + [np.sqrt(gam)] * 2)
    return -(d @ np.linalg.solve(1j * w * np.eye(4) + m, d) + np.eye(4))


def output_spectrum(m, theta, w, n, gam=GAMMA, mu=1.0):
    t, tm, c = transfer(m, w, gam, mu), transfer(m, -w, gam, mu), input_correlations(n)
    aa = t[0] @ c @ tm[0]
    dd = t[1] @ c @ tm[1]
    da = t[1] @ c @ tm[0]
    sx = (np.exp(-2j * theta) * aa + np.exp(2j * theta) * dd + 2 * da).real
    sy = (-np.exp(-2j * theta) * aa - np.exp(2j * theta) * dd + 2 * da).real
    return sx, sy


def closed_form_sym(mode, g, chi, n, gam=GAMMA, mu=1.0):
    if mode == "blue":
        num = mu * (n * gam - 2 * chi) * (gam + mu + 4 * chi) - 4 * g * g * (n * gam - mu - 2 * chi)
        return 2 * num / ((gam + mu + 4 * chi) * (mu * gam + 4 * mu * chi - 4 * g * g))
    if mode == "red":
        return (2 * (n * gam - 2 * chi) * (4 * g * g + mu * gam + mu * mu + 4 * mu * chi)
                / ((gam + mu + 4 * chi) * (4 * g * g + mu * gam + 4 * mu * chi)))
    return (2 * n * gam - 4 * chi) / (gam + 4 * chi)


def show(label, value):
    print(f"{label:48s} {float(value)!r}")


def main():
    dx = np.sqrt(HBAR / (2 * 1e-15 * NU))
    show("zero_point_width", dx)
    show("derive_kappa(0.002, 80nm)", 0.002 * OMEGA_C * dx / (2 * 80e-9))
    show("derive_kappa(0.001, 2.05e-14, 160nm)", 0.001 * OMEGA_C * 2.05e-14 / (2 * 160e-9))
    show("derive_g(9.66, 4.441e11)", 9.66 * 4.441e11 / NU)
    show("derive_g(9.66, 2.22e11)", 9.66 * 2.22e11 / NU)
    k0 = 200e-18 * 0.121 / 80e-9**2
    show("spring_modulation", k0)
    show("derive_chi", k0 / (8 * 1e-15 * NU))
    show("drive_photon_number(4.441e11)", (4.441e11 / NU) ** 2)
    show("drive_photon_number(2.2205e11)", (2.2205e11 / NU) ** 2)
    show("circulating_power(1.249e7)", 1.249e7 * HBAR * OMEGA_C**2)
    show("circulating_power(6.245e6)", 6.245e6 * HBAR * OMEGA_C**2)
    show("thermal_occupancy(10 mK)", 1 / np.expm1(HBAR * NU / (KB * 0.01)))
    show("resonance_mismatch", OMEGA_C * np.sqrt(1.33e-9 * 0.531e-12) - 1)
    show("mu from Q=1e5 at 6 GHz", OMEGA_C / 1e5)
    show("gamma from Q=1e5 at 20 MHz", NU / 1e5)

    show("S_Ym red (0.09, 0.003)", closed_form_sym("red", 0.09, 0.003, 0.0))
    n = moments(drift("red", 0.09, 0.003, GAMMA, 1.0), GAMMA, 1.0, 0.0)
    show("S_Ym red via Lyapunov", (-1j * n[2, 2] + 1j * n[3, 3] + 2 * n[3, 2]).real)
    show("S_Ym blue (0.02, 0.0003)", closed_form_sym("blue", 0.02, 0.0003, 0.0))
    show("S_Ym blue (0.02, 0.0003, n=1.5)", closed_form_sym("blue", 0.02, 0.0003, 1.5))
    show("S_Ym two-tone (0.09, 0.0005)", closed_form_sym("br", 0.09, 0.0005, 0.0))
    show("S_Ym two-tone (0.09, 0.0005, n=1.5)", closed_form_sym("br", 0.09, 0.0005, 1.5))
    g = 3.39e4
    show("red adiabatic occupation", 1.26e3 * 50 / (4 * g * g / 3.77e5 + 1.26e3))

    m = drift("red", 0.09, 0.003, GAMMA, 1.0)
    for w in (0.0, 0.05, 0.3):
        s, a = output_spectrum(m, -np.pi / 4, w, 0.0)
        show(f"red spectrum squeezed w={w}", s)
        show(f"red spectrum antisqueezed w={w}", a)
    show("red spectrum squeezed w=0 n=0.5", output_spectrum(m, -np.pi / 4, 0.0, 0.5)[0])

    for g, chi, nm in ((0.09, 0.003, 0.0), (0.05, 0.001, 0.5), (0.2, 0.01, 1.0)):
        m = drift("red", g, chi, GAMMA, 1.0)
        w = np.linspace(-40, 40, 400001)
        s = np.array([output_spectrum(m, -np.pi / 4, x, nm)[0] for x in w])
        mom = moments(m, GAMMA, 1.0, nm)
        sx = (1j * mom[0, 0] - 1j * mom[1, 1] + 2 * mom[1, 0]).real
        show(f"kappa_norm fit (g={g}, chi={chi}, n={nm})", sx / np.trapezoid(s, w))


if __name__ == "__main__":
    main()
