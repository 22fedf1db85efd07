#include "bicgsafe/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace bicgsafe {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_blank(const std::string& line)
{
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::pair<CsrMatrix<double>, MatrixMetadata> load_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open " + path.string(), 0);

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw MatrixMarketError("empty file", 1);
    ++line_no;

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw MatrixMarketError("missing %%MatrixMarket banner", line_no);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw MatrixMarketError("unsupported object '" + object + "'", line_no);
    if (format != "coordinate")
        throw MatrixMarketError("unsupported format '" + format + "' (only coordinate)", line_no);
    if (field != "real" && field != "integer")
        throw MatrixMarketError("unsupported field '" + field + "' (only real/integer)", line_no);
    if (symmetry != "general" && symmetry != "symmetric")
        throw MatrixMarketError("unsupported symmetry '" + symmetry + "'", line_no);
    const bool symmetric = symmetry == "symmetric";

    Index rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%' || is_blank(line)) continue;
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            throw MatrixMarketError("malformed size line", line_no);
        break;
    }
    if (rows < 0) throw MatrixMarketError("missing size line", line_no);
    if (symmetric && rows != cols) throw MatrixMarketError("symmetric matrix must be square", line_no);

    std::vector<Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    Index read = 0;
    while (read < entries && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%' || is_blank(line)) continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        auto skip_ws = [&] {
            while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
        };
        Index i = 0, j = 0;
        double v = 0.0;
        skip_ws();
        auto r1 = std::from_chars(p, end, i);
        if (r1.ec != std::errc{}) throw MatrixMarketError("cannot parse row index", line_no);
        p = r1.ptr;
        skip_ws();
        auto r2 = std::from_chars(p, end, j);
        if (r2.ec != std::errc{}) throw MatrixMarketError("cannot parse column index", line_no);
        p = r2.ptr;
        skip_ws();
        if (p < end && *p == '+') ++p;
        auto r3 = std::from_chars(p, end, v);
        if (r3.ec != std::errc{}) throw MatrixMarketError("cannot parse value", line_no);
        p = r3.ptr;
        skip_ws();
        if (p != end) throw MatrixMarketError("trailing characters after entry", line_no);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw MatrixMarketError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                                        ") out of range",
                                    line_no);
        triplets.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) triplets.push_back({j - 1, i - 1, v});
        ++read;
    }
    if (read < entries)
        throw MatrixMarketError("expected " + std::to_string(entries) + " entries, found " +
                                    std::to_string(read),
                                line_no);

    auto A = CsrMatrix<double>::from_triplets(rows, cols, std::move(triplets));
    MatrixMetadata meta;
    meta.name = path.stem().string();
    meta.n = A.rows();
    meta.nnz = A.nnz();
    meta.symmetric = symmetric;
    meta.source_path = path.string();
    meta.file_entries = entries;
    return {std::move(A), std::move(meta)};
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix<double>& A)
{
    std::ofstream out(path);
    if (!out) throw MatrixMarketError("cannot write " + path.string(), 0);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto va = A.values();
    char buf[64];
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index k = rp[i]; k < rp[i + 1]; ++k) {
            auto res = std::to_chars(buf, buf + sizeof buf, va[k]);
            out << i + 1 << ' ' << ci[k] + 1 << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
        }
    }
    if (!out) throw MatrixMarketError("write failed for " + path.string(), 0);
}

}  // namespace bicgsafe
