#include "tuckergrid/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tuckergrid {

using nlohmann::json;

void save_tensor_json(const TuckerTensor& t, std::ostream& out) {
    json j;
    j["shape"] = t.shape();
    j["ranks"] = t.ranks();
    json factors = json::array();
    for (int m = 0; m < 3; ++m) {
        const auto& f = t.factor(m);
        std::vector<double> flat(f.data(), f.data() + f.size());
        factors.push_back(flat);
    }
    j["factors"] = std::move(factors);
    j["core"] = t.core().storage();
    out << j.dump();
}

void save_tensor_json(const TuckerTensor& t, const std::string& path) {
    std::ostringstream ss;
    save_tensor_json(t, ss);
    atomic_write(path, ss.str());
}

TuckerTensor load_tensor_json(std::istream& in) {
    json j = json::parse(in);
    std::array<int, 3> shape = j.at("shape");
    std::array<int, 3> ranks = j.at("ranks");
    std::array<Eigen::MatrixXd, 3> factors;
    for (int m = 0; m < 3; ++m) {
        std::vector<double> flat = j.at("factors").at(m);
        if (flat.size() != static_cast<std::size_t>(shape[m]) * ranks[m])
            throw std::runtime_error("load_tensor_json: factor size mismatch");
        factors[m] = Eigen::Map<const Eigen::MatrixXd>(flat.data(), shape[m], ranks[m]);
    }
    std::vector<double> core_flat = j.at("core");
    Dense3 core(ranks);
    if (core_flat.size() != core.size())
        throw std::runtime_error("load_tensor_json: core size mismatch");
    core.storage() = std::move(core_flat);
    return TuckerTensor(std::move(core), std::move(factors));
}

TuckerTensor load_tensor_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_tensor_json: cannot open " + path);
    return load_tensor_json(in);
}

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
        out << contents;
        if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic_write: rename failed for " + path);
}

}  // namespace tuckergrid
