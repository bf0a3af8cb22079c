#include "mre/core/serialize.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace mre {

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

class Writer {
 public:
  std::vector<std::uint8_t> buf;

  void u8(std::uint8_t v) { buf.push_back(v); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) { buf.insert(buf.end(), s.begin(), s.end()); }
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> b, std::size_t end) : b_(b), end_(end) {}

  std::size_t pos() const { return pos_; }
  [[noreturn]] void fail(const std::string& what) const { throw FormatError(what, pos_); }

  std::uint8_t u8() { need(1); return b_[pos_++]; }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  /// A count whose elements each occupy at least `min_size` bytes.
  std::uint32_t count(std::size_t min_size, const char* what) {
    const std::size_t at = pos_;
    const std::uint32_t n = u32();
    if (min_size > 0 && static_cast<std::uint64_t>(n) * min_size > end_ - pos_) {
      throw FormatError(std::string("implausible ") + what + " " + std::to_string(n), at);
    }
    return n;
  }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) fail("truncated input");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> b_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

void write_space(Writer& w, const SpaceSpec& s) {
  w.u32(static_cast<std::uint32_t>(s.size()));
  for (const auto& d : s.dims()) {
    if (const auto* c = std::get_if<ContinuousDim>(&d)) {
      w.u8(0);
      w.f64(c->min);
      w.f64(c->max);
    } else {
      w.u8(1);
      w.i64(std::get<DiscreteDim>(d).cardinality);
    }
  }
}

SpaceSpec read_space(Reader& r) {
  const std::uint32_t n = r.count(9, "dimension count");
  std::vector<DimSpec> dims;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
      const double lo = r.f64();
      const double hi = r.f64();
      dims.emplace_back(ContinuousDim{lo, hi});
    } else if (kind == 1) {
      dims.emplace_back(DiscreteDim{r.i64()});
    } else {
      r.fail("unknown dimension kind " + std::to_string(kind));
    }
  }
  try {
    return SpaceSpec(std::move(dims));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_stack(const DemonstrationStack& stack) {
  const auto snap = stack.snapshot();
  const QuantizationSchema& q = stack.schema();
  Writer w;
  w.bytes("MRME");
  w.u8(kModelFormatVersion);
  write_space(w, q.observation());
  write_space(w, q.action());
  w.u32(static_cast<std::uint32_t>(q.levels()));
  for (std::size_t d = 0; d < q.observation().size(); ++d) {
    for (double s : q.obs_steps(d)) w.f64(s);
  }
  for (std::size_t d = 0; d < q.action().size(); ++d) {
    for (double s : q.action_steps(d)) w.f64(s);
  }
  w.u32(static_cast<std::uint32_t>(stack.max_order()));
  w.u32(static_cast<std::uint32_t>(q.max_level()));
  w.u32(static_cast<std::uint32_t>(stack.min_match_level()));
  const auto& fb = stack.fallback();
  w.u8(static_cast<std::uint8_t>(fb.kind()));
  if (fb.kind() == FallbackPolicy::Kind::Idle) {
    for (double v : fb.idle_action()) w.f64(v);
  }
  w.u32(static_cast<std::uint32_t>(snap->size()));
  for (const auto& e : *snap) {
    const std::size_t len_at = w.buf.size();
    w.u32(0);
    w.u64(e->source_id());
    w.u32(static_cast<std::uint32_t>(e->transitions()));
    for (const Vec& a : e->actions()) {
      for (double v : a) w.f64(v);
    }
    for (const MarkovModel& m : e->models()) {
      w.u32(static_cast<std::uint32_t>(m.size()));
      for (const auto& [key, bag] : m.sorted_entries()) {
        w.u32(static_cast<std::uint32_t>(key->size()));
        w.bytes(*key);
        w.u32(static_cast<std::uint32_t>(bag->size()));
        for (auto ref : bag->refs()) w.u32(ref);
      }
    }
    w.patch_u32(len_at, static_cast<std::uint32_t>(w.buf.size() - len_at - 4));
  }
  w.u32(crc32_of(w.buf));
  return std::move(w.buf);
}

DemonstrationStack deserialize_stack(std::span<const std::uint8_t> bytes,
                                     std::optional<FallbackPolicy> custom_fallback) {
  if (bytes.size() < 5 + 4) throw FormatError("truncated input", bytes.size());
  if (std::memcmp(bytes.data(), "MRME", 4) != 0) throw FormatError("bad magic", 0);
  if (bytes[4] != kModelFormatVersion) {
    throw FormatError("unsupported version " + std::to_string(bytes[4]), 4);
  }
  const std::size_t body_end = bytes.size() - 4;
  std::uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i) stored_crc |= static_cast<std::uint32_t>(bytes[body_end + i]) << (8 * i);
  if (crc32_of(bytes.first(body_end)) != stored_crc) throw FormatError("CRC mismatch", body_end);

  Reader r(bytes, body_end);
  r.bytes(5);
  SpaceSpec obs = read_space(r);
  SpaceSpec act = read_space(r);
  const std::uint32_t levels = r.u32();
  if (levels == 0 || levels > 41) r.fail("bad level count");
  auto read_steps = [&](const SpaceSpec& s) {
    std::vector<std::vector<double>> out(s.size());
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (s.is_continuous(d)) {
        for (std::uint32_t j = 0; j < levels; ++j) out[d].push_back(r.f64());
      }
    }
    return out;
  };
  auto obs_steps = read_steps(obs);
  auto act_steps = read_steps(act);
  const std::size_t schema_at = r.pos();
  std::shared_ptr<const QuantizationSchema> schema;
  try {
    if (obs.continuous_count() + act.continuous_count() == 0) {
      schema = std::make_shared<const QuantizationSchema>(
          QuantizationSchema::halving(obs, act, static_cast<int>(levels) - 1));
    } else {
      schema = std::make_shared<const QuantizationSchema>(obs, act, std::move(obs_steps),
                                                          std::move(act_steps));
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad schema: ") + e.what(), schema_at);
  }
  const std::uint32_t max_order = r.u32();
  const std::uint32_t max_level = r.u32();
  const std::uint32_t min_level = r.u32();
  if (max_order > static_cast<std::uint32_t>(kMaxOrder)) r.fail("bad max order");
  if (max_level + 1 != levels || min_level > max_level) r.fail("inconsistent level header");

  const std::uint8_t fb_kind = r.u8();
  std::optional<FallbackPolicy> fallback;
  switch (fb_kind) {
    case 0:
      fallback = FallbackPolicy::uniform_random(act);
      break;
    case 1: {
      Vec idle(act.size());
      for (double& v : idle) v = r.f64();
      try {
        fallback = FallbackPolicy::idle(act, idle);
      } catch (const std::invalid_argument& e) {
        r.fail(std::string("bad idle action: ") + e.what());
      }
      break;
    }
    case 2:
      fallback = custom_fallback ? *custom_fallback : FallbackPolicy::uniform_random(act);
      break;
    default:
      r.fail("unknown fallback kind " + std::to_string(fb_kind));
  }

  DemonstrationStack stack(schema, static_cast<int>(max_order), *fallback,
                           static_cast<int>(min_level));
  const std::size_t ad = act.size();
  const std::size_t od = obs.size();
  const std::uint32_t n_ens = r.count(12, "ensemble count");
  std::vector<std::shared_ptr<const MarkovEnsemble>> ensembles;
  ensembles.reserve(n_ens);
  for (std::uint32_t e = 0; e < n_ens; ++e) {
    const std::size_t len_at = r.pos();
    const std::uint32_t section = r.u32();
    if (section > body_end - r.pos()) throw FormatError("section length exceeds input", len_at);
    const std::size_t section_end = r.pos() + section;
    auto ens = std::make_shared<MarkovEnsemble>(schema, static_cast<int>(max_order), r.u64());
    const std::uint32_t n_actions = r.count(8 * ad, "action count");
    std::vector<Vec> actions(n_actions, Vec(ad));
    for (Vec& a : actions) {
      for (double& v : a) v = r.f64();
      if (!act.contains(a)) r.fail("stored action outside the action space");
    }
    for (std::uint32_t j = 0; j < levels; ++j) {
      for (std::uint32_t i = 0; i <= max_order; ++i) {
        MarkovModel& m = ens->model(static_cast<int>(i), static_cast<int>(j));
        const std::size_t key_len = 2 + 8 * (od + ad * i);
        const std::uint32_t entries = r.count(8 + key_len, "entry count");
        for (std::uint32_t k = 0; k < entries; ++k) {
          const std::size_t at = r.pos();
          if (r.u32() != key_len) throw FormatError("bad key length", at);
          std::string key = r.bytes(key_len);
          const std::uint32_t bag_size = r.count(4, "bag size");
          if (bag_size == 0) r.fail("empty action bag");
          std::vector<std::uint32_t> refs(bag_size);
          for (auto& ref : refs) {
            ref = r.u32();
            if (ref >= n_actions) r.fail("action reference out of range");
          }
          try {
            m.emplace(std::move(key), ActionBag(std::move(refs)));
          } catch (const std::invalid_argument& err) {
            throw FormatError(err.what(), at);
          }
        }
      }
    }
    if (r.pos() != section_end) throw FormatError("section length mismatch", len_at);
    ens->set_actions(std::move(actions));
    ensembles.push_back(std::move(ens));
  }
  if (r.pos() != body_end) r.fail("trailing bytes before CRC");
  for (auto it = ensembles.rbegin(); it != ensembles.rend(); ++it) stack.push(*it);
  return stack;
}

void save_stack(const DemonstrationStack& stack, const std::filesystem::path& path) {
  const auto bytes = serialize_stack(stack);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

DemonstrationStack load_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_stack(bytes);
}

}  // namespace mre
