#include "officedr/dataset.hpp"

#include "officedr/binary_io.hpp"

namespace officedr {

namespace {

constexpr std::uint32_t kDatasetVersion = 1;

void write_header_fields(std::ostream& out, const DatasetHeader& h) {
  bin::write_magic(out, "ODDS");
  bin::write<std::uint32_t>(out, h.version);
  bin::write<std::uint32_t>(out, h.obs_dim);
  bin::write<std::uint32_t>(out, h.action_dim);
  bin::write<std::uint64_t>(out, h.total);
  for (auto c : h.variant_counts) bin::write<std::uint64_t>(out, c);
  bin::write_doubles(out, h.grid);
}

DatasetHeader read_header_fields(std::istream& in) {
  bin::expect_magic(in, "ODDS", "dataset");
  DatasetHeader h;
  h.version = bin::read<std::uint32_t>(in);
  if (h.version != kDatasetVersion) throw IoError("unsupported dataset version " + std::to_string(h.version));
  h.obs_dim = bin::read<std::uint32_t>(in);
  h.action_dim = bin::read<std::uint32_t>(in);
  if (h.obs_dim == 0 || h.obs_dim > 4096 || h.action_dim == 0 || h.action_dim > 4096) {
    throw IoError("implausible dataset dimensions");
  }
  h.total = bin::read<std::uint64_t>(in);
  for (auto& c : h.variant_counts) c = bin::read<std::uint64_t>(in);
  std::uint64_t sum = 0;
  for (auto c : h.variant_counts) sum += c;
  if (sum != h.total) throw IoError("dataset header counts are inconsistent");
  h.grid.resize(h.action_dim);
  bin::read_doubles(in, h.grid);
  return h;
}

}  // namespace

std::size_t DatasetHeader::record_bytes() const {
  // obs, action, reward, next_obs, done/source/variant, demand, d_hat, lambda
  return sizeof(double) * (2 * obs_dim + 2 * action_dim + 3) + 3;
}

DatasetWriter::DatasetWriter(const std::filesystem::path& path, std::uint32_t obs_dim, std::uint32_t action_dim,
                             const Hourly& grid)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write dataset " + path.string());
  if (grid.size() != action_dim) throw ValidationError("dataset grid length differs from action dimension");
  header_.version = kDatasetVersion;
  header_.obs_dim = obs_dim;
  header_.action_dim = action_dim;
  header_.grid = grid;
  write_header();
}

DatasetWriter::~DatasetWriter() {
  try {
    close();
  } catch (...) {
    // Destructors must not throw; explicit close() reports failures.
  }
}

void DatasetWriter::write_header() {
  out_.seekp(0);
  write_header_fields(out_, header_);
}

void DatasetWriter::write(const DatasetRecord& r) {
  if (closed_) throw IoError("dataset writer already closed");
  const Transition& t = r.transition;
  if (t.obs.size() != header_.obs_dim || t.next_obs.size() != header_.obs_dim ||
      t.action.size() != header_.action_dim || r.demand.size() != header_.action_dim) {
    throw ValidationError("dataset record dimension mismatch");
  }
  bin::write_doubles(out_, t.obs);
  bin::write_doubles(out_, t.action);
  bin::write<double>(out_, t.reward);
  bin::write_doubles(out_, t.next_obs);
  bin::write<std::uint8_t>(out_, t.done ? 1 : 0);
  bin::write<std::uint8_t>(out_, static_cast<std::uint8_t>(t.source));
  bin::write<std::uint8_t>(out_, static_cast<std::uint8_t>(r.variant));
  bin::write_doubles(out_, r.demand);
  bin::write<double>(out_, r.d_hat);
  bin::write<double>(out_, r.lambda);
  ++header_.total;
  ++header_.variant_counts[static_cast<std::size_t>(r.variant)];
}

void DatasetWriter::close() {
  if (closed_) return;
  closed_ = true;
  write_header();
  out_.close();
  if (!out_) throw IoError("failed to finalize dataset");
}

DatasetReader::DatasetReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw MissingPrerequisite("dataset not found: " + path.string(), "generate-dataset");
  header_ = read_header_fields(in_);
}

bool DatasetReader::next(DatasetRecord& r) {
  if (read_ == header_.total) return false;
  Transition& t = r.transition;
  t.obs.resize(header_.obs_dim);
  t.next_obs.resize(header_.obs_dim);
  t.action.resize(header_.action_dim);
  r.demand.resize(header_.action_dim);
  bin::read_doubles(in_, t.obs);
  bin::read_doubles(in_, t.action);
  t.reward = bin::read<double>(in_);
  bin::read_doubles(in_, t.next_obs);
  t.done = bin::read<std::uint8_t>(in_) != 0;
  const auto source = bin::read<std::uint8_t>(in_);
  const auto variant = bin::read<std::uint8_t>(in_);
  if (source > 2 || variant > 3) throw IoError("corrupt dataset record tags");
  t.source = static_cast<SourceTag>(source);
  r.variant = static_cast<ResponseKind>(variant);
  bin::read_doubles(in_, r.demand);
  r.d_hat = bin::read<double>(in_);
  r.lambda = bin::read<double>(in_);
  ++read_;
  return true;
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
  DatasetReader reader(path);
  std::vector<DatasetRecord> records;
  records.reserve(reader.header().total);
  DatasetRecord r;
  while (reader.next(r)) records.push_back(r);
  return records;
}

DatasetHeader read_dataset_header(const std::filesystem::path& path) { return DatasetReader(path).header(); }

}  // namespace officedr
