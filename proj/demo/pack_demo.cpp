// Minimal library walkthrough: define a radius law directly, pack a box,
// and write the layout as CSV and SVG into the working directory.

#include <granpack/packing.hpp>
#include <granpack/svg.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

int main() {
    using namespace granpack;

    // Radii drawn straight from Lognormal(ln 0.4, 0.2), in mm.
    RadiusModel model;
    model.size_model = LognormalParams(std::log(0.4), 0.2);
    model.fit_space = FitSpace::linear;

    PackConfig cfg;
    cfg.target_porosity = 0.62;
    cfg.seed = 2024;

    const auto box = Domain::rectangle(30.0, 30.0);
    const auto packing = sequential_pack(box, model, cfg);

    std::printf("placed %zu disks (budget %lld), porosity %.4f vs target %.2f, stopped: %s\n",
                packing.particles.size(), packing.estimated_count,
                packing.achieved_porosity, packing.target_porosity,
                termination_name(packing.termination));

    std::ofstream csv("demo_packing.csv");
    write_packing_csv(packing.particles, csv);
    std::ofstream svg("demo_packing.svg");
    write_packing_svg(packing, "lognormal radii in a 30x30 mm box", svg);
    std::puts("wrote demo_packing.csv and demo_packing.svg");
    return 0;
}
