#include "dcm/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcm/errors.hpp"
#include "dcm/io_util.hpp"
#include "dcm/rng.hpp"
#include "dcm/version.hpp"

namespace dcm {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError(path, "cannot write file");
    out << content;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

void InputDigests::add(const std::string& path, const std::string& content) {
    by_file[path] = hex64(fnv1a64(content));
}

std::string InputDigests::joined() const {
    std::string out;
    for (const auto& [path, digest] : by_file) {
        if (!out.empty()) out += ",";
        // strip directories; the digest identifies the content
        const auto slash = path.find_last_of('/');
        out += (slash == std::string::npos ? path : path.substr(slash + 1)) +
               ":" + digest;
    }
    return out;
}

std::string export_header(const std::string& kind, std::uint64_t master_seed,
                          const InputDigests& inputs) {
    std::ostringstream out;
    out << "# dcm-export/1 " << kind << "\n";
    out << "# tool=" << kToolName << "-" << kVersion << " seed=" << master_seed
        << " inputs=" << inputs.joined() << "\n";
    return out.str();
}

std::string summary_csv(const std::vector<SweepCell>& rows,
                        std::uint64_t master_seed,
                        const InputDigests& inputs) {
    std::ostringstream out;
    out << export_header("summary", master_seed, inputs);
    out << "system,stance,prior,variant,median,mean,q05,q25,q75,q95,n_runs,"
           "seed\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        out << r.system_id << ',' << r.stance << ',' << r.prior_label << ','
            << r.variant << ',' << fmt_double(s.median) << ','
            << fmt_double(s.mean) << ',' << fmt_double(s.q05) << ','
            << fmt_double(s.q25) << ',' << fmt_double(s.q75) << ','
            << fmt_double(s.q95) << ',' << s.n_runs << ','
            << s.prov.master_seed << "\n";
    }
    return out.str();
}

std::string runs_csv(const std::vector<SweepCell>& rows,
                     std::uint64_t master_seed, const InputDigests& inputs) {
    std::ostringstream out;
    out << export_header("runs", master_seed, inputs);
    out << "system,stance,prior,variant,run,posterior\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.summary.values.size(); ++i) {
            out << r.system_id << ',' << r.stance << ',' << r.prior_label
                << ',' << r.variant << ',' << i << ','
                << fmt_double(r.summary.values[i]) << "\n";
        }
    }
    return out.str();
}

std::string summary_json(const std::vector<SweepCell>& rows,
                         std::uint64_t master_seed,
                         const InputDigests& inputs) {
    nlohmann::ordered_json doc;
    doc["format"] = "dcm-export/1";
    doc["tool"] = std::string(kToolName) + "-" + kVersion;
    doc["seed"] = master_seed;
    doc["inputs"] = inputs.joined();
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        const auto& s = r.summary;
        records.push_back({{"system", r.system_id},
                           {"stance", r.stance},
                           {"prior", r.prior_label},
                           {"variant", r.variant},
                           {"median", s.median},
                           {"mean", s.mean},
                           {"q05", s.q05},
                           {"q25", s.q25},
                           {"q75", s.q75},
                           {"q95", s.q95},
                           {"n_runs", s.n_runs},
                           {"seed", s.prov.master_seed},
                           {"converged", s.converged}});
    }
    doc["records"] = std::move(records);
    return doc.dump(1) + "\n";
}

std::string panel_csv(const IndicatorPanel& panel, std::uint64_t master_seed,
                      const InputDigests& inputs) {
    std::ostringstream out;
    out << export_header("panel " + panel.system_id, master_seed, inputs);
    out << "indicator,credence,n_respondents\n";
    for (const auto& [indicator, credence] : panel.credences)
        out << indicator << ',' << fmt_double(credence) << ','
            << panel.n_respondents.at(indicator) << "\n";
    return out.str();
}

std::string ordinal_csv(const OrdinalReport& report,
                        std::uint64_t master_seed,
                        const InputDigests& inputs) {
    std::ostringstream out;
    out << export_header("ordinal", master_seed, inputs);
    out << "kind,stance,prior,system_a,system_b\n";
    for (const auto& v : report.violations)
        out << "violation," << v.stance << ',' << v.prior_label << ','
            << v.system_a << ',' << v.system_b << "\n";
    for (const auto& t : report.ties)
        out << "tie," << t.stance << ',' << t.prior_label << ',' << t.system_a
            << ',' << t.system_b << "\n";
    return out.str();
}

} // namespace dcm
