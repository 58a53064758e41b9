from pathlib import Path

from tumor_phasefield.manager import SimulationManager
from tumor_phasefield.schemas.config import SimConfig
from tumor_phasefield.schemas.contexts import RunContext
from tumor_phasefield.schemas.grid import Grid2D
from tumor_phasefield.schemas.responses import BaseResponse

# 1. Instantiate the `RunContext` class.
# Every run gets its own directory `base_dir / run_name` holding the configuration echo,
# the diagnostics CSV, field snapshots (CSV and PGM) and a manifest.
base_dir = Path.home() / "Documents" / "sample-tumor-phasefield-script"
context = RunContext(base_dir=base_dir)

# 2. Instantiate the `SimulationManager`.
# Each method returns a response schema containing a success flag, a message, an exit code
# and the relevant payload.
manager = SimulationManager(context)


def handle_res_message(res: BaseResponse) -> None:
    pre_msg = "Success" if res.is_success else f"Error (exit code {res.exit_code})"
    print(f"{pre_msg}: {res.message}")


def main() -> None:
    # A small scenario: default sources and region on a coarse grid
    config = SimConfig(grid=Grid2D(nx=32, ny=32), t_final=0.05, output_every=10)

    # Write the configuration as a commented YAML file
    print("\n--- Write the configuration ---")
    res_write = manager.write_config(base_dir / "config.yaml", config)
    handle_res_message(res_write)

    # Check the inward-pointing hypothesis before running
    print("\n--- Check the admissible region ---")
    res_check = manager.check_region(config)
    if res_check.verdict is not None:
        print(f"Worst margin: {res_check.verdict.worst_margin:.6g}")
    handle_res_message(res_check)

    # Integrate the ODE of the spatial means
    print("\n--- Integrate the mean ODE ---")
    res_ode = manager.mean_ode(config, t_final=20.0, dt=0.01, record_every=100)
    if res_ode.trajectory is not None:
        final = res_ode.trajectory.final
        print(f"Means at t = {final.t:g}: ({final.y_p:.6f}, {final.y_d:.6f})")
    handle_res_message(res_ode)

    # Run the simulation
    print("\n--- Run the simulation ---")
    res_sim = manager.simulate(config, run_name="sample_run")
    if res_sim.manifest is not None:
        print(f"Final energy: {res_sim.manifest.final.energy:.10g}")
        print(f"Files: {[str(p) for p in res_sim.manifest.output_files[:5]]} ...")
    handle_res_message(res_sim)

    # Epsilon continuation on an even coarser grid
    print("\n--- Epsilon continuation ---")
    small = config.model_copy(update={"grid": Grid2D(nx=16, ny=16), "t_final": 0.02})
    res_cont = manager.continuation(small, [0.1, 0.05, 0.025])
    if res_cont.table is not None:
        for row in res_cont.table.rows:
            print(f"epsilon={row.epsilon:g} distance={row.distance_to_previous} min_p={row.min_p:.5f}")
    handle_res_message(res_cont)

    print(
        f"\n[Cleanup Notice]\nAfter testing, manually delete the sample directory: {base_dir}"
    )


if __name__ == "__main__":
    main()
