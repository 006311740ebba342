#include "spiky/certificate.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace spiky {

namespace {

using nlohmann::json;

json pattern_to_json(const BlockyPattern& p) {
    json blocks = json::array();
    for (const auto& b : p.blocks) blocks.push_back({{"rows", b.rows}, {"cols", b.cols}});
    return blocks;
}

BlockyPattern pattern_from_json(const json& blocks, int nrows, int ncols) {
    BlockyPattern p(nrows, ncols);
    for (const auto& b : blocks) {
        BlockyPattern::Block blk;
        blk.rows = b.at("rows").get<std::vector<int>>();
        blk.cols = b.at("cols").get<std::vector<int>>();
        p.blocks.push_back(std::move(blk));
    }
    p.canonicalize();
    return p;
}

} // namespace

std::string certificate_to_json(const Decomposition& d, const std::string& target_hash) {
    json j;
    j["kind"] = kind_name(d.kind);
    j["nrows"] = d.nrows;
    j["ncols"] = d.ncols;
    j["field"] = field_name(d.field);
    j["targetHash"] = target_hash;
    if (d.kind == DecompKind::ApproxSum) j["epsilon"] = d.epsilon;

    json meta = json::object();
    if (!d.algo.empty()) meta["algo"] = d.algo;
    for (const auto& [key, val] : d.metadata) meta[key] = val;
    j["metadata"] = meta;

    json terms = json::array();
    for (const auto& t : d.blocky_terms)
        terms.push_back({{"blocks", pattern_to_json(t.pattern)}, {"coeff", t.coeff}});
    for (const auto& t : d.spiky_terms)
        terms.push_back({{"blocks", pattern_to_json(t.pattern)}, {"u", t.u}, {"v", t.v}});
    j["terms"] = terms;
    return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    json j = json::parse(text);
    Certificate cert;
    Decomposition& d = cert.decomposition;
    d.kind = kind_from_name(j.at("kind").get<std::string>());
    d.nrows = j.at("nrows").get<int>();
    d.ncols = j.at("ncols").get<int>();
    d.field = field_from_name(j.at("field").get<std::string>());
    cert.target_hash = j.value("targetHash", std::string());
    d.epsilon = j.value("epsilon", 0.0);

    if (j.contains("metadata"))
        for (auto& [key, val] : j["metadata"].items()) {
            if (key == "algo")
                d.algo = val.get<std::string>();
            else if (val.is_number())
                d.metadata[key] = val.get<double>();
        }

    for (const auto& t : j.at("terms")) {
        if (t.contains("u")) {
            SpikyTerm st;
            st.pattern = pattern_from_json(t.at("blocks"), d.nrows, d.ncols);
            st.u = t.at("u").get<std::vector<double>>();
            st.v = t.at("v").get<std::vector<double>>();
            d.spiky_terms.push_back(std::move(st));
        } else {
            BlockyTerm bt;
            bt.pattern = pattern_from_json(t.at("blocks"), d.nrows, d.ncols);
            bt.coeff = t.at("coeff").get<double>();
            d.blocky_terms.push_back(std::move(bt));
        }
    }
    return cert;
}

void save_certificate(const Decomposition& d, const std::string& target_hash,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << certificate_to_json(d, target_hash);
}

Certificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return certificate_from_json(text);
}

} // namespace spiky
