"""Show that replacing the Holder Simpson sum by twice the smaller term is not a valid bound.

f(x) = (x - 1/2)_+^3 has f' = 0 on [0, 1/2], so the smaller mean term vanishes
while the Simpson defect does not.
"""
from amquad import bounds
from amquad.expr import compile_expr
from amquad.model import ConvexityParams

f = compile_expr("((x - 1/2 + abs(x - 1/2))/2)^3")
fp = compile_expr("3*((x - 1/2 + abs(x - 1/2))/2)^2")


def main():
    rp = bounds.preset_rule("simpson")
    for q in (1.5, 2.0, 3.0):
        cp = ConvexityParams(1, 1, q)
        d = abs(bounds.defect(f, rp))
        e = [abs(fp(v)) ** q for v in (0.0, 0.5, 1.0)]
        halved = bounds.preset_holder_prefactor("simpson", rp, cp) * 2 * min(
            ((e[0] + e[1]) / 2) ** (1 / q), ((e[1] + e[2]) / 2) ** (1 / q))
        full = bounds.bound_holder(fp, rp, cp)
        print(f"q={q:g}: |defect|={d:.6g} holder bound={full:.6g} halved form={halved:.6g}")


if __name__ == "__main__":
    main()
