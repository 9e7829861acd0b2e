#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace tuckergrid {

struct Nucleus {
    double charge = 0.0;               // Z, atomic units
    std::array<double, 3> position{};  // bohr
};

/// Closed-shell system: N doubly occupied orbitals, except in the
/// single-electron path where one orbital holds one electron.
struct Molecule {
    std::vector<Nucleus> nuclei;
    int n_orbitals = 0;
    double occupancy = 2.0;

    double electron_count() const { return n_orbitals * occupancy; }

    double nuclear_repulsion() const {
        double e = 0.0;
        for (std::size_t i = 0; i < nuclei.size(); ++i)
            for (std::size_t j = i + 1; j < nuclei.size(); ++j) {
                const auto& a = nuclei[i].position;
                const auto& b = nuclei[j].position;
                const double d = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) +
                                           (a[1] - b[1]) * (a[1] - b[1]) +
                                           (a[2] - b[2]) * (a[2] - b[2]));
                e += nuclei[i].charge * nuclei[j].charge / d;
            }
        return e;
    }
};

}  // namespace tuckergrid
