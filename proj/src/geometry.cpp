#include "tuckergrid/geometry.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tuckergrid {

namespace {

const std::array<const char*, 36> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr"};

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("geometry parse error at line " + std::to_string(line) +
                             ": " + what);
}

std::string lowered(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

double element_charge(const std::string& symbol) {
    std::string s = symbol;
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    for (std::size_t i = 1; i < s.size(); ++i)
        s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    for (std::size_t z = 0; z < kSymbols.size(); ++z)
        if (s == kSymbols[z]) return static_cast<double>(z + 1);
    throw std::runtime_error("unknown element symbol: " + symbol);
}

Molecule parse_geometry_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) parse_fail(1, "empty file");
    ++lineno;
    int count = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> count) || count <= 0) parse_fail(lineno, "expected positive atom count");
    }

    if (!std::getline(in, line)) parse_fail(lineno + 1, "missing unit line");
    ++lineno;
    double to_bohr = 0.0;
    {
        std::istringstream ls(lowered(line));
        std::string tok;
        while (ls >> tok) {
            if (tok == "angstrom" || tok == "ang") to_bohr = kBohrPerAngstrom;
            if (tok == "bohr" || tok == "au") to_bohr = 1.0;
        }
        if (to_bohr == 0.0)
            parse_fail(lineno, "unit line must contain 'angstrom' or 'bohr'");
    }

    Molecule mol;
    for (int a = 0; a < count; ++a) {
        if (!std::getline(in, line)) parse_fail(lineno + 1, "missing atom row");
        ++lineno;
        std::istringstream ls(line);
        std::string symbol;
        double x, y, z;
        if (!(ls >> symbol >> x >> y >> z)) parse_fail(lineno, "malformed atom row");
        Nucleus nuc;
        try {
            nuc.charge = element_charge(symbol);
        } catch (const std::exception& e) {
            parse_fail(lineno, e.what());
        }
        nuc.position = {x * to_bohr, y * to_bohr, z * to_bohr};
        mol.nuclei.push_back(nuc);
    }

    const double zsum = [&] {
        double s = 0.0;
        for (const auto& nuc : mol.nuclei) s += nuc.charge;
        return s;
    }();
    const long ne = std::lround(zsum);
    if (ne == 1) {
        mol.n_orbitals = 1;
        mol.occupancy = 1.0;
    } else if (ne % 2 == 0) {
        mol.n_orbitals = static_cast<int>(ne / 2);
        mol.occupancy = 2.0;
    } else {
        throw std::runtime_error(
            "geometry: odd electron count (open-shell systems are not supported)");
    }
    return mol;
}

Molecule parse_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("geometry: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_geometry_text(ss.str());
}

}  // namespace tuckergrid
