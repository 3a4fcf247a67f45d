#include "spintomo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spintomo {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + ": malformed JSON: " + e.what());
    }
}

json matrix_to_json_obj(const Mat3& m) {
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < 3; ++i) {
        json re_row = json::array();
        json im_row = json::array();
        for (int j = 0; j < 3; ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return json{{"re", re}, {"im", im}};
}

Mat3 matrix_from_json_obj(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw ValidationError(std::string(what) + ": expected an object with \"re\" and \"im\"");
    }
    Mat3 m;
    try {
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) {
                const double re = j.at("re").at(i).at(k).get<double>();
                const double im = j.at("im").at(i).at(k).get<double>();
                m(i, k) = Complex(re, im);
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + ": bad matrix layout: " + e.what());
    }
    return m;
}

std::string format_phi(double phi) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", phi);
    return buf;
}

std::string format_prob(double p) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", p);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError(std::string(what) + ": not a number: '" + s + "'");
    }
    if (pos != s.size()) {
        throw ValidationError(std::string(what) + ": trailing junk in number: '" + s + "'");
    }
    return v;
}

long parse_count(const std::string& s, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError(std::string(what) + ": not an integer count: '" + s + "'");
    }
    if (pos != s.size()) {
        throw ValidationError(std::string(what) + ": counts must be integers: '" + s + "'");
    }
    return v;
}

SpinDirection direction_from_json_obj(const json& j, const char* what) {
    if (j.is_string()) {
        const auto named = named_direction(j.get<std::string>());
        if (!named) {
            throw ValidationError(std::string(what) + ": unknown direction name '"
                                  + j.get<std::string>() + "'");
        }
        return *named;
    }
    if (j.is_array() && j.size() == 3) {
        Eigen::Vector3d n(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
        if (std::abs(n.norm() - 1.0) > 1e-6) {
            std::ostringstream os;
            os << what << ": direction norm " << n.norm() << " deviates from 1 beyond 1e-6";
            throw ValidationError(os.str());
        }
        return SpinDirection::normalized(n);
    }
    throw ValidationError(std::string(what) + ": direction must be a name or a 3-array");
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure: " + path.string());
    }
    return os.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failure: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string density_matrix_to_json(const DensityMatrix& rho) {
    return matrix_to_json_obj(rho.matrix()).dump(2) + "\n";
}

DensityMatrix density_matrix_from_json(const std::string& text) {
    const json j = parse_json(text, "density matrix");
    const Mat3 m = matrix_from_json_obj(j, "density matrix");
    return DensityMatrix(m, 1e-9); // decimal serialization loses precision
}

Mat3 hermitian3_from_json(const std::string& text) {
    const json j = parse_json(text, "hermitian matrix");
    const Mat3 m = matrix_from_json_obj(j, "hermitian matrix");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError("hermitian matrix: entries are not Hermitian within 1e-9");
    }
    return m;
}

std::string hermitian3_to_json(const Mat3& m) {
    return matrix_to_json_obj(m).dump(2) + "\n";
}

std::string circuit_to_json(const std::vector<CircuitElement>& elements) {
    json arr = json::array();
    for (const auto& e : elements) {
        std::visit(
            [&arr](const auto& el) {
                using T = std::decay_t<decltype(el)>;
                if constexpr (std::is_same_v<T, PhaseShifter>) {
                    arr.push_back({{"kind", "phase"}, {"param", el.phi},
                                   {"mode", to_string(el.mode)}});
                } else if constexpr (std::is_same_v<T, BeamSplitter>) {
                    arr.push_back({{"kind", "bs"}, {"param", el.eta}});
                } else {
                    arr.push_back({{"kind", "mzi"}, {"param", el.theta}});
                }
            },
            e);
    }
    return arr.dump(2) + "\n";
}

std::vector<CircuitElement> circuit_from_json(const std::string& text) {
    const json j = parse_json(text, "circuit");
    if (!j.is_array()) {
        throw ValidationError("circuit: expected a JSON array of elements");
    }
    std::vector<CircuitElement> elements;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("kind") || !item.contains("param")) {
            throw ValidationError("circuit: each element needs \"kind\" and \"param\"");
        }
        const std::string kind = item.at("kind").get<std::string>();
        const double param = item.at("param").get<double>();
        if (kind == "phase") {
            Mode mode = Mode::c;
            if (item.contains("mode")) {
                const std::string m = item.at("mode").get<std::string>();
                if (m == "c") mode = Mode::c;
                else if (m == "d") mode = Mode::d;
                else throw ValidationError("circuit: phase mode must be \"c\" or \"d\"");
            }
            elements.push_back(PhaseShifter{param, mode});
        } else if (kind == "bs") {
            elements.push_back(BeamSplitter{param});
        } else if (kind == "mzi") {
            elements.push_back(MziElement{param});
        } else {
            throw ValidationError("circuit: unknown element kind '" + kind + "'");
        }
    }
    return elements;
}

std::string source_params_to_json(const SourceParams& params) {
    return json{{"R", params.contamination}, {"V", params.visibility}}.dump(2) + "\n";
}

SourceParams source_params_from_json(const std::string& text) {
    const json j = parse_json(text, "source params");
    if (!j.is_object() || !j.contains("R") || !j.contains("V")) {
        throw ValidationError("source params: expected {\"R\": ..., \"V\": ...}");
    }
    return SourceParams(j.at("R").get<double>(), j.at("V").get<double>());
}

SpinDirection direction_from_json(const std::string& text) {
    return direction_from_json_obj(parse_json(text, "direction"), "direction");
}

std::string direction_to_json(const SpinDirection& n) {
    return json::array({n.x(), n.y(), n.z()}).dump() + "\n";
}

std::optional<double> TomographyInput::lz_first_moment() const {
    if (lz_mean) return lz_mean;
    if (lz_probs) {
        return moments_from_probs((*lz_probs)[0], (*lz_probs)[1], (*lz_probs)[2]).first;
    }
    if (lz_counts) {
        const double n = static_cast<double>((*lz_counts)[0] + (*lz_counts)[1] + (*lz_counts)[2]);
        if (n <= 0) throw ValidationError("tomography input: empty lz counts");
        return ((*lz_counts)[0] - (*lz_counts)[2]) / n;
    }
    return std::nullopt;
}

ProbabilityTable TomographyInput::effective_table() const {
    if (table) return *table;
    if (counts) return counts->to_table();
    throw ValidationError("tomography input: no probabilities or counts present");
}

TomographyInput tomography_input_from_json(const std::string& text) {
    const json j = parse_json(text, "tomography input");
    if (!j.is_object() || !j.contains("directions") || !j.at("directions").is_array()
        || j.at("directions").empty()) {
        throw ValidationError("tomography input: expected a non-empty \"directions\" array");
    }

    std::vector<SpinDirection> dirs;
    std::vector<std::array<double, 3>> prob_rows;
    std::vector<std::array<long, 3>> count_rows;
    bool has_probs = false;
    bool has_counts = false;

    for (const auto& item : j.at("directions")) {
        if (!item.is_object()) {
            throw ValidationError("tomography input: each direction entry must be an object");
        }
        if (item.contains("name")) {
            dirs.push_back(direction_from_json_obj(item.at("name"), "tomography input"));
        } else if (item.contains("n")) {
            dirs.push_back(direction_from_json_obj(item.at("n"), "tomography input"));
        } else {
            throw ValidationError("tomography input: direction entry needs \"name\" or \"n\"");
        }
        if (item.contains("probs")) {
            const auto& p = item.at("probs");
            if (!p.is_array() || p.size() != 3) {
                throw ValidationError("tomography input: \"probs\" must be a 3-array");
            }
            prob_rows.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
            has_probs = true;
        } else if (item.contains("counts")) {
            const auto& c = item.at("counts");
            if (!c.is_array() || c.size() != 3) {
                throw ValidationError("tomography input: \"counts\" must be a 3-array");
            }
            for (const auto& v : c) {
                if (!v.is_number_integer() && !v.is_number_unsigned()) {
                    throw ValidationError("tomography input: counts must be integers");
                }
            }
            count_rows.push_back({c.at(0).get<long>(), c.at(1).get<long>(), c.at(2).get<long>()});
            has_counts = true;
        } else {
            throw ValidationError("tomography input: direction entry needs \"probs\" or \"counts\"");
        }
    }
    if (has_probs && has_counts) {
        throw ValidationError("tomography input: mixing \"probs\" and \"counts\" rows is not supported");
    }

    TomographyInput input;
    if (has_probs) {
        input.table = ProbabilityTable::renormalized(dirs, std::move(prob_rows));
    } else {
        CountRecord rec;
        rec.directions = dirs;
        rec.counts = std::move(count_rows);
        rec.validate();
        input.counts = std::move(rec);
    }

    if (j.contains("lz")) {
        const auto& lz = j.at("lz");
        if (!lz.is_object()) {
            throw ValidationError("tomography input: \"lz\" must be an object");
        }
        if (lz.contains("probs")) {
            const auto& p = lz.at("probs");
            if (!p.is_array() || p.size() != 3) {
                throw ValidationError("tomography input: lz \"probs\" must be a 3-array");
            }
            input.lz_probs = {{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()}};
        } else if (lz.contains("counts")) {
            const auto& c = lz.at("counts");
            if (!c.is_array() || c.size() != 3) {
                throw ValidationError("tomography input: lz \"counts\" must be a 3-array");
            }
            input.lz_counts = {{c.at(0).get<long>(), c.at(1).get<long>(), c.at(2).get<long>()}};
        } else if (lz.contains("mean")) {
            input.lz_mean = lz.at("mean").get<double>();
        } else {
            throw ValidationError("tomography input: \"lz\" needs \"probs\", \"counts\", or \"mean\"");
        }
    }
    return input;
}

std::string probability_table_to_json(const ProbabilityTable& table,
                                      std::optional<double> lz_mean) {
    json dirs = json::array();
    const auto& five = five_directions();
    for (std::size_t k = 0; k < table.size(); ++k) {
        json entry;
        bool named = false;
        for (std::size_t f = 0; f < five.size(); ++f) {
            if ((table.directions()[k].axis() - five[f].axis()).norm() < 1e-12) {
                entry["name"] = "L" + std::to_string(f + 1);
                named = true;
                break;
            }
        }
        if (!named) {
            const auto& n = table.directions()[k];
            entry["n"] = {n.x(), n.y(), n.z()};
        }
        entry["probs"] = {table.rows()[k][0], table.rows()[k][1], table.rows()[k][2]};
        dirs.push_back(entry);
    }
    json out{{"directions", dirs}};
    if (lz_mean) out["lz"] = json{{"mean", *lz_mean}};
    return out.dump(2) + "\n";
}

std::string tomography_result_to_json(const TomographyResult& result) {
    json j = json::object();
    if (result.rho_raw) j["rho_raw"] = matrix_to_json_obj(result.rho_raw->matrix());
    if (result.rho_ml) j["rho_ml"] = matrix_to_json_obj(result.rho_ml->matrix());
    if (result.eigenvalues_raw) {
        j["eigenvalues_raw"] = {(*result.eigenvalues_raw)(0), (*result.eigenvalues_raw)(1),
                                (*result.eigenvalues_raw)(2)};
    }
    if (result.eigenvalues_ml) {
        j["eigenvalues_ml"] = {(*result.eigenvalues_ml)(0), (*result.eigenvalues_ml)(1),
                               (*result.eigenvalues_ml)(2)};
    }
    if (result.purity_raw) j["purity_raw"] = *result.purity_raw;
    if (result.purity_ml) j["purity_ml"] = *result.purity_ml;
    if (result.trace_norm_distance) j["trace_norm_distance"] = *result.trace_norm_distance;
    if (result.log_likelihood_ml) j["log_likelihood_ml"] = *result.log_likelihood_ml;
    if (result.iterations) j["iterations"] = *result.iterations;
    if (result.converged) j["converged"] = *result.converged;
    if (result.inversion_rank) j["inversion_rank"] = *result.inversion_rank;
    return j.dump(2) + "\n";
}

std::string consistency_report_to_json(const ConsistencyReport& report) {
    json j{{"residual_L1", report.residual_l1}, {"residual_L2", report.residual_l2}};
    if (report.residual_lz) j["residual_Lz"] = *report.residual_lz;
    return j.dump(2) + "\n";
}

std::string fringe_probabilities_to_csv(const FringeProbabilities& probs) {
    probs.validate();
    std::string out = "phi,p20,p11,p02\n";
    for (std::size_t i = 0; i < probs.phi.size(); ++i) {
        out += format_phi(probs.phi[i]);
        for (int m = 0; m < 3; ++m) {
            out += ',';
            out += format_prob(probs.probs[i][static_cast<std::size_t>(m)]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

FringeProbabilities fringe_probabilities_from_csv(const std::string& text, double theta) {
    const auto lines = csv_lines(text);
    if (lines.empty() || lines[0] != "phi,p20,p11,p02") {
        throw ValidationError("fringe probabilities CSV: expected header phi,p20,p11,p02");
    }
    FringeProbabilities out;
    out.theta = theta;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4) {
            throw ValidationError("fringe probabilities CSV: row " + std::to_string(i)
                                  + " does not have 4 fields");
        }
        out.phi.push_back(parse_double(fields[0], "fringe probabilities CSV"));
        out.probs.push_back({parse_double(fields[1], "fringe probabilities CSV"),
                             parse_double(fields[2], "fringe probabilities CSV"),
                             parse_double(fields[3], "fringe probabilities CSV")});
    }
    out.validate();
    return out;
}

std::string fringe_counts_to_csv(const FringeCounts& counts) {
    counts.validate();
    std::string out = "phi,count20,count11,count02\n";
    for (std::size_t i = 0; i < counts.phi.size(); ++i) {
        out += format_phi(counts.phi[i]);
        for (int m = 0; m < 3; ++m) {
            out += ',';
            out += std::to_string(counts.counts[i][static_cast<std::size_t>(m)]);
        }
        out += '\n';
    }
    return out;
}

FringeCounts fringe_counts_from_csv(const std::string& text, double theta) {
    const auto lines = csv_lines(text);
    if (lines.empty() || lines[0] != "phi,count20,count11,count02") {
        throw ValidationError("fringe counts CSV: expected header phi,count20,count11,count02");
    }
    FringeCounts out;
    out.theta = theta;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4) {
            throw ValidationError("fringe counts CSV: row " + std::to_string(i)
                                  + " does not have 4 fields");
        }
        out.phi.push_back(parse_double(fields[0], "fringe counts CSV"));
        out.counts.push_back({parse_count(fields[1], "fringe counts CSV"),
                              parse_count(fields[2], "fringe counts CSV"),
                              parse_count(fields[3], "fringe counts CSV")});
    }
    out.validate();
    return out;
}

std::string fit_result_to_json(const FitResult& fit) {
    json cov = json::array();
    for (int i = 0; i < 6; ++i) {
        json row = json::array();
        for (int j = 0; j < 6; ++j) row.push_back(fit.covariance(i, j));
        cov.push_back(row);
    }
    json j{
        {"V", fit.mixture_visibility},
        {"R", fit.contamination},
        {"sigma_V", fit.sigma_visibility},
        {"sigma_R", fit.sigma_contamination},
        {"N20", fit.norms[0]},
        {"N11", fit.norms[1]},
        {"N02", fit.norms[2]},
        {"phase_offset", fit.phase_offset},
        {"residual", fit.residual},
        {"per_basis_visibility",
         {fit.per_basis_visibility[0], fit.per_basis_visibility[1], fit.per_basis_visibility[2]}},
        {"converged", fit.converged},
        {"at_boundary", fit.at_boundary},
        {"covariance", cov},
    };
    return j.dump(2) + "\n";
}

} // namespace spintomo
