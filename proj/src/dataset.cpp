#include "moscl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace moscl {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("csv: bad ") + what + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string_view to_string(Quadrant q) {
    switch (q) {
        case Quadrant::hh: return "HH";
        case Quadrant::lh: return "LH";
        case Quadrant::ll: return "LL";
        case Quadrant::hl: return "HL";
    }
    return "??";
}

Quadrant parse_quadrant(std::string_view name) {
    for (const auto q : kAllQuadrants) {
        if (to_string(q) == name) return q;
    }
    throw std::invalid_argument("unknown quadrant '" + std::string(name) + "'");
}

std::vector<SampleId> Dataset::ids() const {
    std::vector<SampleId> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.id);
    return out;
}

const Sample& Dataset::by_id(SampleId id) const {
    const auto it = std::find_if(samples.begin(), samples.end(), [id](const Sample& s) { return s.id == id; });
    if (it == samples.end()) throw std::out_of_range("no sample with id " + std::to_string(id));
    return *it;
}

void Dataset::validate() const {
    std::set<SampleId> seen;
    const auto dim = feature_dim();
    for (const auto& s : samples) {
        if (!seen.insert(s.id).second) throw std::invalid_argument("duplicate sample id " + std::to_string(s.id));
        if (s.x.size() != dim) throw std::invalid_argument("ragged feature vector at id " + std::to_string(s.id));
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string dataset_to_csv(const Dataset& data) {
    std::string out = "id,y,clean_label,true_quadrant";
    for (std::size_t k = 0; k < data.feature_dim(); ++k) out += ",x" + std::to_string(k);
    out += '\n';
    for (const auto& s : data.samples) {
        out += std::to_string(s.id) + ',' + std::to_string(s.y) + ',' + std::to_string(s.clean_label) + ',' +
               std::string(to_string(s.true_quadrant));
        for (const double v : s.x) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

Dataset dataset_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty dataset file");
    const auto header = split(line, ',');
    if (header.size() < 5 || header[0] != "id" || header[1] != "y" || header[2] != "clean_label" ||
        header[3] != "true_quadrant") {
        throw std::runtime_error("csv: unexpected dataset header '" + line + "'");
    }
    const std::size_t dim = header.size() - 4;

    Dataset data;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) throw std::runtime_error("csv: wrong column count in '" + line + "'");
        Sample s;
        s.id = parse_number<SampleId>(cells[0], "id");
        s.y = parse_number<int>(cells[1], "label");
        s.clean_label = parse_number<int>(cells[2], "clean label");
        s.true_quadrant = parse_quadrant(cells[3]);
        s.x.reserve(dim);
        for (std::size_t k = 0; k < dim; ++k) s.x.push_back(parse_number<double>(cells[4 + k], "feature"));
        data.samples.push_back(std::move(s));
    }
    data.validate();
    return data;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void save_dataset(const Dataset& data, const std::string& path) { write_text_file(path, dataset_to_csv(data)); }

Dataset load_dataset(const std::string& path) { return dataset_from_csv(read_text_file(path)); }

}  // namespace moscl
