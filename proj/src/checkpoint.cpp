#include "hypalign/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "hypalign/error.hpp"

namespace hypalign {

namespace {

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "\t%.17g", v);
  out += buf;
}

template <class Derived>
void put_all(std::string& out, const Eigen::DenseBase<Derived>& m) {
  // Column-major order, matching the storage of the embedding matrices.
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) put(out, m(i, j));
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line split on tabs; throws at end of input.
  const std::vector<std::string_view>& next(std::string_view expect) {
    if (pos_ >= text_.size()) fail("unexpected end of model, wanted '" + std::string(expect) + "'");
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    fields_.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields_.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields_[0] != expect) fail("expected '" + std::string(expect) + "' record");
    return fields_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model line " + std::to_string(line_no_) + ": " + what);
  }

  double real(std::string_view s) const {
    // strtod rather than from_chars: the latter is missing for doubles on older toolchains.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) fail("bad number '" + tmp + "'");
    return v;
  }

  long long integer(std::string_view s) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad integer '" + std::string(s) + "'");
    return v;
  }

  void arity(const std::vector<std::string_view>& f, std::size_t n) const {
    if (f.size() != n) {
      fail("'" + std::string(f[0]) + "' record has " + std::to_string(f.size()) + " fields, expected " +
           std::to_string(n));
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
  std::vector<std::string_view> fields_;
};

}  // namespace

std::string format_model(const JointModel& model) {
  std::string out = "hypalign-model\t" + std::to_string(kModelFormatVersion) + "\n";
  out += "version\t" HYPALIGN_VERSION "\n";
  out += "dim\t" + std::to_string(model.dim) + "\n";
  out += "alpha";
  put(out, model.alpha1);
  put(out, model.alpha2);
  out += "\n";
  out += "config\t" + std::to_string(model.config.size()) + "\n";
  for (const auto& [k, v] : model.config) out += "option\t" + k + "\t" + v + "\n";
  for (Side side : {Side::Source, Side::Target}) {
    const NetworkEmbedding& net = model.net(side);
    const CommunityModel& comm = net.community;
    out += std::string("network\t") + side_name(side) + "\t" + std::to_string(net.tokens.size()) + "\t" +
           std::to_string(comm.size()) + "\n";
    for (std::size_t i = 0; i < net.tokens.size(); ++i) {
      out += "node\t" + net.tokens[i] + "\t" + std::to_string(net.degrees[i]);
      put_all(out, net.theta.col(static_cast<Eigen::Index>(i)));
      put_all(out, net.context.col(static_cast<Eigen::Index>(i)));
      out += "\n";
    }
    for (int p = 0; p < comm.size(); ++p) {
      const GHParams& psi = comm.components()[static_cast<std::size_t>(p)];
      out += "component";
      put(out, comm.membership().priors(p));
      put(out, psi.r());
      put(out, psi.omega());
      put_all(out, psi.mu());
      put_all(out, psi.beta());
      put_all(out, psi.scatter());
      out += "\n";
    }
    if (comm.size() > 0) {
      for (Eigen::Index i = 0; i < comm.membership().z.rows(); ++i) {
        out += "z";
        put_all(out, comm.membership().z.row(i));
        out += "\n";
      }
    }
  }
  out += "end\n";
  return out;
}

JointModel parse_model(std::string_view text) {
  LineReader in(text);
  JointModel model;
  {
    const auto& f = in.next("hypalign-model");
    in.arity(f, 2);
    if (in.integer(f[1]) != kModelFormatVersion) in.fail("unsupported model format version");
  }
  in.next("version");
  {
    const auto& f = in.next("dim");
    in.arity(f, 2);
    model.dim = static_cast<int>(in.integer(f[1]));
    if (model.dim < 1 || model.dim > kMaxDim) in.fail("dimension out of range");
  }
  {
    const auto& f = in.next("alpha");
    in.arity(f, 3);
    model.alpha1 = in.real(f[1]);
    model.alpha2 = in.real(f[2]);
  }
  {
    const auto& f = in.next("config");
    in.arity(f, 2);
    const long long n = in.integer(f[1]);
    for (long long i = 0; i < n; ++i) {
      const auto& o = in.next("option");
      in.arity(o, 3);
      model.config.emplace_back(std::string(o[1]), std::string(o[2]));
    }
  }
  const int d = model.dim;
  for (Side side : {Side::Source, Side::Target}) {
    const auto& f = in.next("network");
    in.arity(f, 4);
    if (f[1] != side_name(side)) in.fail("networks out of order");
    const auto n = static_cast<Eigen::Index>(in.integer(f[2]));
    const int c = static_cast<int>(in.integer(f[3]));
    if (n < 0 || c < 0) in.fail("negative count");
    NetworkEmbedding& net = model.net(side);
    net.theta.resize(d, n);
    net.context.resize(d, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = in.next("node");
      in.arity(row, 3 + 2 * static_cast<std::size_t>(d));
      net.tokens.emplace_back(row[1]);
      net.degrees.push_back(static_cast<std::uint32_t>(in.integer(row[2])));
      for (int k = 0; k < d; ++k) {
        net.theta(k, i) = in.real(row[3 + static_cast<std::size_t>(k)]);
        net.context(k, i) = in.real(row[3 + static_cast<std::size_t>(d + k)]);
      }
    }
    if (c == 0) continue;
    std::vector<GHParams> comps;
    Membership m;
    m.priors.resize(c);
    for (int p = 0; p < c; ++p) {
      const auto& row = in.next("component");
      in.arity(row, 4 + 2 * static_cast<std::size_t>(d) + static_cast<std::size_t>(d * d));
      std::size_t at = 1;
      auto next = [&] { return in.real(row[at++]); };
      m.priors(p) = next();
      const double r = next();
      const double omega = next();
      Eigen::VectorXd mu(d), beta(d);
      Eigen::MatrixXd scatter(d, d);
      for (int k = 0; k < d; ++k) mu(k) = next();
      for (int k = 0; k < d; ++k) beta(k) = next();
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) scatter(k, j) = next();
      }
      try {
        comps.emplace_back(std::move(mu), scatter, std::move(beta), r, omega);
      } catch (const Error& e) {
        in.fail(e.what());
      }
    }
    m.z.resize(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = in.next("z");
      in.arity(row, 1 + static_cast<std::size_t>(c));
      for (int p = 0; p < c; ++p) m.z(i, p) = in.real(row[1 + static_cast<std::size_t>(p)]);
    }
    net.community = CommunityModel(std::move(comps), std::move(m));
  }
  in.next("end");
  return model;
}

void save_model(const JointModel& model, const std::string& path) {
  write_text_file(path, format_model(model));
}

JointModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_model(text);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace hypalign
