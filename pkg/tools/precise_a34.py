"""Run the A3/A4 acceptance configurations exactly as the test module will
(same seeds, same grids) and print the criterion arithmetic."""

import sys

sys.path.insert(0, "tests")
import test_acceptance as acc


def main():
    for name in ("a3_l3_scl32", "a4_l3_epmu32", "a4_unq_3q_scl32"):
        recs = acc.records(name)
        for r in recs:
            print(name, r.ebn0_db, r.frames, {m: r.errors[m] for m in r.errors},
                  flush=True)
    x_pm = acc.crossing("a3_l3_scl32", "pm")
    x_lml = acc.crossing("a3_l3_scl32", "lml")
    x_list = acc.crossing("a3_l3_scl32", "list")
    x_epmu = acc.crossing("a4_l3_epmu32", "lml")
    x_unq = acc.crossing("a4_unq_3q_scl32", "pm")
    print(f"A3: pm {x_pm:.3f}  lml {x_lml:.3f}  list {x_list:.3f}")
    print(f"    ml gain {x_pm - x_lml:.3f} (0.5+-0.15)   |lml-list| "
          f"{abs(x_lml - x_list):.3f} (<=0.1)")
    print(f"A4: epmu lml {x_epmu:.3f}  extra {x_lml - x_epmu:.3f} (0.2+-0.15)  "
          f"combined {x_pm - x_epmu:.3f} (0.7+-0.2)")
    print(f"    unq scl32 pm {x_unq:.3f}  (decoder loss at L=32: "
          f"{x_pm - x_unq:.3f})")


if __name__ == "__main__":
    main()
