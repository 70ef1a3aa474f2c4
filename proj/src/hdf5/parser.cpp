// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/parser.hpp"

#include <algorithm>
#include <cstring>
#include <optional>
#include <set>
#include <string>

namespace faultfs::hdf5 {

namespace {

using K = ParseErrorKind;
using R = FieldRole;

constexpr std::uint64_t kSuperblockSize = 96;
constexpr std::uint64_t kHeaderPrefix = 16;
constexpr std::uint64_t kSymbolEntrySize = 40;
constexpr std::uint64_t kFreeNull = 1;
constexpr std::uint64_t kMaxRawBytes = std::uint64_t{1} << 32;

struct Message {
  std::uint16_t type = 0;
  std::uint64_t at = 0;  ///< payload offset
  std::uint64_t size = 0;
  std::uint8_t flags = 0;
};

class Parser {
 public:
  explicit Parser(ByteSpan file) : f_(file) { m_.file_size = file.size(); }

  Hdf5Model run() {
    superblock();
    const auto root = object_header(m_.superblock.root_header_address, 64, "root_header");
    root_group(root);
    dataset(object_header(m_.dataset_header_address, dataset_addr_at_, "dataset_header"));
    return std::move(m_);
  }

 private:
  [[noreturn]] void fail(K kind, std::uint64_t at, const std::string& field,
                         const std::string& detail) {
    throw ParseError(kind, at, field, detail);
  }

  void need(std::uint64_t at, std::uint64_t len, const std::string& field) {
    if (at >= f_.size() && len > 0) fail(K::AddressOutOfBounds, at, field, "beyond end of file");
    if (len > f_.size() - at) fail(K::TruncatedMessage, at, field, "structure runs past end of file");
  }

  void mark(std::uint64_t at, std::uint64_t len, std::string name, R role) {
    if (len > 0) m_.fields.push_back({std::move(name), at, len, role});
    meta_end_ = std::max(meta_end_, at + len);
  }

  std::uint64_t get(std::uint64_t at, std::uint64_t len, std::string name, R role) {
    need(at, len, name);
    const std::uint64_t v = load_le(f_.subspan(at), len);
    mark(at, len, std::move(name), role);
    return v;
  }

  void version(std::uint64_t at, std::uint64_t expected, const std::string& name) {
    const std::uint64_t v = get(at, 1, name, R::Version);
    if (v != expected) {
      fail(K::UnsupportedVersion, at, name,
           "version " + std::to_string(v) + ", supported " + std::to_string(expected));
    }
  }

  void signature(std::uint64_t at, std::string_view sig, const std::string& name) {
    need(at, sig.size(), name);
    mark(at, sig.size(), name, R::Signature);
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (f_[at + i] != static_cast<std::uint8_t>(sig[i])) {
        fail(K::BadSignature, at + i, name, "signature mismatch");
      }
    }
  }

  /// Converts a stored relative address into a file offset that must lie
  /// below the stored end-of-file address.
  std::uint64_t resolve(std::uint64_t addr, std::uint64_t field_at, const std::string& name) {
    if (addr == kUndefAddr || addr >= m_.superblock.eof_address) {
      fail(K::AddressOutOfBounds, field_at, name, "address outside the file");
    }
    return m_.superblock.base_address + addr;
  }

  void superblock() {
    need(0, kSuperblockSize, "superblock");
    signature(0, std::string_view(reinterpret_cast<const char*>(kSignature.data()), 8),
              "superblock.signature");
    version(8, 0, "superblock.version");
    version(9, 0, "superblock.free_space_version");
    version(10, 0, "superblock.root_group_version");
    mark(11, 1, "superblock.reserved0", R::Reserved);
    version(12, 0, "superblock.shared_header_version");
    if (get(13, 1, "superblock.sizeof_offsets", R::Other) != 8) {
      fail(K::UnsupportedFeature, 13, "superblock.sizeof_offsets", "only 8-byte offsets");
    }
    if (get(14, 1, "superblock.sizeof_lengths", R::Other) != 8) {
      fail(K::UnsupportedFeature, 14, "superblock.sizeof_lengths", "only 8-byte lengths");
    }
    mark(15, 1, "superblock.reserved1", R::Reserved);
    Superblock& sb = m_.superblock;
    sb.group_leaf_k = static_cast<std::uint16_t>(get(16, 2, "superblock.group_leaf_k", R::Other));
    sb.group_internal_k =
        static_cast<std::uint16_t>(get(18, 2, "superblock.group_internal_k", R::Other));
    if (sb.group_leaf_k == 0) fail(K::InvalidValue, 16, "superblock.group_leaf_k", "must be > 0");
    if (sb.group_internal_k == 0) {
      fail(K::InvalidValue, 18, "superblock.group_internal_k", "must be > 0");
    }
    sb.consistency_flags =
        static_cast<std::uint32_t>(get(20, 4, "superblock.consistency_flags", R::Other));
    sb.base_address = get(24, 8, "superblock.base_address", R::Other);
    if (get(32, 8, "superblock.free_space_address", R::Other) != kUndefAddr) {
      fail(K::UnsupportedFeature, 32, "superblock.free_space_address",
           "superblock extension / free-space index not supported");
    }
    sb.eof_address = get(40, 8, "superblock.eof_address", R::Other);
    if (sb.base_address > f_.size() || sb.eof_address > f_.size() - sb.base_address) {
      fail(K::AddressOutOfBounds, 40, "superblock.eof_address",
           "stored end of file " + std::to_string(sb.eof_address) + " exceeds file size " +
               std::to_string(f_.size()) + " (truncated file)");
    }
    if (get(48, 8, "superblock.driver_info_address", R::Other) != kUndefAddr) {
      fail(K::UnsupportedFeature, 48, "superblock.driver_info_address",
           "driver information block not supported");
    }
    symbol_entry(56, "superblock.root_entry", /*root=*/true);
  }

  /// Returns (name offset, object header address).
  std::pair<std::uint64_t, std::uint64_t> symbol_entry(std::uint64_t at, const std::string& p,
                                                       bool root) {
    const std::uint64_t name = get(at, 8, p + ".link_name_offset", R::Other);
    const std::uint64_t header = get(at + 8, 8, p + ".object_header_address", R::Other);
    const std::uint64_t cache = get(at + 16, 4, p + ".cache_type", R::Other);
    if (cache > 2) fail(K::InvalidValue, at + 16, p + ".cache_type", "unknown cache type");
    mark(at + 20, 4, p + ".reserved", R::Reserved);
    if (root) {
      m_.superblock.root_header_address = header;
      m_.superblock.root_cached_btree = get(at + 24, 8, p + ".scratch.btree_address", R::Other);
      m_.superblock.root_cached_heap = get(at + 32, 8, p + ".scratch.heap_address", R::Other);
    } else {
      mark(at + 24, 16, p + ".scratch", R::Other);
    }
    return {name, header};
  }

  std::vector<Message> object_header(std::uint64_t addr, std::uint64_t field_at,
                                     const std::string& p) {
    const std::uint64_t at = resolve(addr, field_at, p + " address");
    need(at, kHeaderPrefix, p);
    version(at, 1, p + ".version");
    mark(at + 1, 1, p + ".reserved", R::Reserved);
    const std::uint64_t nmsgs = get(at + 2, 2, p + ".message_count", R::Other);
    get(at + 4, 4, p + ".reference_count", R::Other);
    const std::uint64_t size = get(at + 8, 4, p + ".header_size", R::Other);
    mark(at + 12, 4, p + ".padding", R::Reserved);

    const std::uint64_t begin = at + kHeaderPrefix;
    need(begin, size, p + ".messages");
    std::vector<Message> msgs;
    std::uint64_t cur = begin;
    const std::uint64_t end = begin + size;
    while (cur < end) {
      const std::string q = p + ".msg" + std::to_string(msgs.size());
      if (end - cur < 8) fail(K::TruncatedMessage, cur, q, "partial message header");
      Message m;
      m.type = static_cast<std::uint16_t>(get(cur, 2, q + ".type", R::Other));
      m.size = get(cur + 2, 2, q + ".size", R::Other);
      m.flags = static_cast<std::uint8_t>(get(cur + 4, 1, q + ".flags", R::Other));
      mark(cur + 5, 3, q + ".reserved", R::Reserved);
      if (m.size % 8 != 0) fail(K::InvalidValue, cur + 2, q + ".size", "message not aligned");
      m.at = cur + 8;
      if (m.size > end - m.at) fail(K::TruncatedMessage, cur + 2, q + ".size", "message overruns header");
      if (m.flags & 0x02) fail(K::UnsupportedFeature, cur + 4, q + ".flags", "shared messages");
      msgs.push_back(m);
      cur = m.at + m.size;
    }
    if (msgs.size() != nmsgs) {
      fail(K::InvalidValue, at + 2, p + ".message_count",
           "header holds " + std::to_string(msgs.size()) + " messages, count says " +
               std::to_string(nmsgs));
    }
    return msgs;
  }

  void root_group(const std::vector<Message>& msgs) {
    const Message* stab = nullptr;
    for (const Message& m : msgs) {
      if (m.type == 0x11 && !stab) {
        stab = &m;
      } else {
        unknown_payload(m, "root_header.msg");
      }
    }
    if (!stab) fail(K::NotFound, 0, "root_header", "no symbol table message");
    if (stab->size < 16) fail(K::TruncatedMessage, stab->at, "root_header.symbol_table", "short");
    GroupTable& g = m_.root;
    g.btree_address = get(stab->at, 8, "root_header.symbol_table.btree_address", R::Other);
    g.heap_address = get(stab->at + 8, 8, "root_header.symbol_table.heap_address", R::Other);
    mark(stab->at + 16, stab->size - 16, "root_header.symbol_table.padding", R::Reserved);

    local_heap(resolve(g.heap_address, stab->at + 8, "root_header.symbol_table.heap_address"));
    const std::uint64_t child =
        btree_lookup(resolve(g.btree_address, stab->at, "root_header.symbol_table.btree_address"));
    g.symbol_node_address = child;
    m_.dataset_header_address = symbol_node(resolve(child, btree_child_at_, "btree.child"));
  }

  void unknown_payload(const Message& m, const std::string& p) {
    const R role = m.type == 0 ? R::Reserved : R::Other;
    mark(m.at, m.size, p + (m.type == 0 ? ".nil_payload" : ".payload"), role);
    if (m.type != 0 && (m.flags & 0x80)) {
      fail(K::UnsupportedFeature, m.at - 4, p + ".flags", "unknown message marked fail-always");
    }
  }

  void local_heap(std::uint64_t at) {
    need(at, 32, "heap");
    signature(at, "HEAP", "heap.signature");
    version(at + 4, 0, "heap.version");
    mark(at + 5, 3, "heap.reserved", R::Reserved);
    const std::uint64_t size = get(at + 8, 8, "heap.data_size", R::Other);
    const std::uint64_t free_head = get(at + 16, 8, "heap.free_list_head", R::Other);
    const std::uint64_t data = get(at + 24, 8, "heap.data_address", R::Other);
    heap_data_ = resolve(data, at + 24, "heap.data_address");
    if (size == 0 || size > f_.size() - heap_data_) {
      fail(K::AddressOutOfBounds, at + 8, "heap.data_size", "data segment outside file");
    }
    need(heap_data_, size, "heap.data");
    heap_size_ = size;
    m_.root.heap_data_address = heap_data_;
    m_.root.heap_data_size = size;
    meta_end_ = std::max(meta_end_, heap_data_ + size);

    std::set<std::uint64_t> seen;
    std::uint64_t off = free_head;
    std::uint64_t field_at = at + 16;
    while (off != kFreeNull) {
      if (off >= size || !seen.insert(off).second) {
        fail(K::InvalidValue, field_at, "heap.free_list", "bad heap free list");
      }
      if (size - off < 16) fail(K::TruncatedMessage, heap_data_ + off, "heap.free_block", "short");
      const std::uint64_t next = get(heap_data_ + off, 8, "heap.free_block.next", R::Other);
      const std::uint64_t len = get(heap_data_ + off + 8, 8, "heap.free_block.size", R::Other);
      if (len < 16 || len > size - off) {
        fail(K::InvalidValue, heap_data_ + off + 8, "heap.free_block.size", "bad heap free list");
      }
      mark(heap_data_ + off + 16, len - 16, "heap.free_space", R::Reserved);
      field_at = heap_data_ + off;
      off = next;
    }
  }

  std::string heap_string(std::uint64_t off, std::uint64_t field_at, const std::string& name) {
    if (off >= heap_size_) fail(K::AddressOutOfBounds, field_at, name, "offset outside local heap");
    const std::uint8_t* s = f_.data() + heap_data_ + off;
    const std::uint64_t max = heap_size_ - off;
    const void* nul = std::memchr(s, 0, max);
    if (!nul) fail(K::TruncatedMessage, field_at, name, "unterminated heap string");
    const std::uint64_t len = static_cast<const std::uint8_t*>(nul) - s;
    if (strings_.insert(off).second) mark(heap_data_ + off, len + 1, "heap.string", R::Other);
    return std::string(reinterpret_cast<const char*>(s), len);
  }

  std::uint64_t btree_lookup(std::uint64_t at) {
    const std::uint64_t k2 = 2u * m_.superblock.group_internal_k;
    const std::uint64_t node_size = 24 + (k2 + 1) * 8 + k2 * 8;
    need(at, node_size, "btree");
    signature(at, "TREE", "btree.signature");
    if (get(at + 4, 1, "btree.node_type", R::Other) != 0) {
      fail(K::InvalidValue, at + 4, "btree.node_type", "not a group node");
    }
    if (get(at + 5, 1, "btree.node_level", R::Other) != 0) {
      fail(K::UnsupportedFeature, at + 5, "btree.node_level", "only single-level trees");
    }
    const std::uint64_t used = get(at + 6, 2, "btree.entries_used", R::Other);
    if (used > k2) fail(K::InvalidValue, at + 6, "btree.entries_used", "exceeds node capacity");
    get(at + 8, 8, "btree.left_sibling", R::Other);
    get(at + 16, 8, "btree.right_sibling", R::Other);

    std::optional<std::uint64_t> found;
    const std::uint64_t keys = at + 24;
    for (std::uint64_t i = 0; i < used; ++i) {
      const std::uint64_t kat = keys + 16 * i;
      const std::uint64_t lo = get(kat, 8, "btree.key" + std::to_string(i), R::Other);
      const std::uint64_t child = get(kat + 8, 8, "btree.child" + std::to_string(i), R::Other);
      const std::uint64_t hi = get(kat + 16, 8, "btree.key" + std::to_string(i + 1), R::Other);
      const std::string left = heap_string(lo, kat, "btree.key" + std::to_string(i));
      const std::string right = heap_string(hi, kat + 16, "btree.key" + std::to_string(i + 1));
      if (!found && kDatasetName > left && kDatasetName <= right) {
        found = child;
        btree_child_at_ = kat + 8;
      }
    }
    const std::uint64_t used_end = keys + 16 * used + (used > 0 ? 8 : 0);
    mark(used_end, at + node_size - used_end, "btree.unused", R::Reserved);
    if (!found) fail(K::NotFound, at, "btree", "dataset name not in group");
    return *found;
  }

  std::uint64_t symbol_node(std::uint64_t at) {
    const std::uint64_t cap = 2u * m_.superblock.group_leaf_k;
    const std::uint64_t node_size = 8 + cap * kSymbolEntrySize;
    need(at, node_size, "symbol_node");
    signature(at, "SNOD", "symbol_node.signature");
    version(at + 4, 1, "symbol_node.version");
    mark(at + 5, 1, "symbol_node.reserved", R::Reserved);
    const std::uint64_t nsyms = get(at + 6, 2, "symbol_node.symbol_count", R::Other);
    if (nsyms > cap) fail(K::InvalidValue, at + 6, "symbol_node.symbol_count", "exceeds capacity");
    std::optional<std::uint64_t> header;
    for (std::uint64_t i = 0; i < nsyms; ++i) {
      const std::uint64_t eat = at + 8 + i * kSymbolEntrySize;
      const std::string p = "symbol_node.entry" + std::to_string(i);
      auto [name_off, addr] = symbol_entry(eat, p, false);
      if (!header && heap_string(name_off, eat, p + ".link_name_offset") == kDatasetName) {
        header = addr;
        dataset_addr_at_ = eat + 8;
      }
    }
    const std::uint64_t used_end = at + 8 + nsyms * kSymbolEntrySize;
    mark(used_end, at + node_size - used_end, "symbol_node.unused", R::Reserved);
    if (!header) fail(K::NotFound, at, "symbol_node", "dataset name not in symbol node");
    return *header;
  }

  void dataset(const std::vector<Message>& msgs) {
    const Message *space = nullptr, *type = nullptr, *layout = nullptr, *fill = nullptr;
    for (const Message& m : msgs) {
      const Message** slot = nullptr;
      switch (m.type) {
        case 0x01: slot = &space; break;
        case 0x03: slot = &type; break;
        case 0x05: slot = &fill; break;
        case 0x08: slot = &layout; break;
        default: break;
      }
      if (slot && !*slot) {
        *slot = &m;
      } else {
        unknown_payload(m, "dataset_header.msg");
      }
    }
    if (!space) fail(K::NotFound, 0, "dataset_header.dataspace", "missing dataspace message");
    if (!type) fail(K::NotFound, 0, "dataset_header.datatype", "missing datatype message");
    if (!layout) fail(K::NotFound, 0, "dataset_header.layout", "missing layout message");
    dataspace(*space);
    datatype(*type);
    if (fill) fill_value(*fill);
    data_layout(*layout);
    m_.metadata_size = meta_end_;
  }

  void dataspace(const Message& m) {
    const std::uint64_t at = m.at;
    if (m.size < 8) fail(K::TruncatedMessage, at, "dataspace", "short message");
    version(at, 1, "dataspace.version");
    const std::uint64_t rank = get(at + 1, 1, "dataspace.rank", R::Dims);
    const std::uint64_t flags = get(at + 2, 1, "dataspace.flags", R::Other);
    mark(at + 3, 5, "dataspace.reserved", R::Reserved);
    if (rank > 32) fail(K::InvalidValue, at + 1, "dataspace.rank", "rank above 32");
    if (flags & 0x02) fail(K::UnsupportedFeature, at + 2, "dataspace.flags", "permutation index");
    const bool has_max = flags & 0x01;
    const std::uint64_t need_size = 8 + rank * 8 * (has_max ? 2 : 1);
    if (need_size > m.size) fail(K::TruncatedMessage, at + 1, "dataspace.rank", "dimensions overrun message");
    m_.dims.clear();
    m_.max_dims.clear();
    for (std::uint64_t i = 0; i < rank; ++i) {
      m_.dims.push_back(get(at + 8 + 8 * i, 8, "dataspace.dim" + std::to_string(i), R::Dims));
    }
    for (std::uint64_t i = 0; has_max && i < rank; ++i) {
      const std::uint64_t fat = at + 8 + 8 * (rank + i);
      const std::uint64_t mx = get(fat, 8, "dataspace.max_dim" + std::to_string(i), R::Dims);
      if (mx != kUndefAddr && mx < m_.dims[i]) {
        fail(K::InvalidValue, fat, "dataspace.max_dim" + std::to_string(i),
             "maximum dimension below current dimension");
      }
      m_.max_dims.push_back(mx);
    }
    mark(at + need_size, m.size - need_size, "dataspace.padding", R::Reserved);
  }

  void datatype(const Message& m) {
    const std::uint64_t at = m.at;
    if (m.size < 20) fail(K::TruncatedMessage, at, "datatype", "short message");
    const std::uint64_t vc = get(at, 1, "datatype.version_class", R::Version);
    if ((vc >> 4) != 1) fail(K::UnsupportedVersion, at, "datatype.version_class", "datatype version");
    if ((vc & 0x0F) != 1) {
      fail(K::UnsupportedFeature, at, "datatype.version_class", "only floating-point class");
    }
    FloatProperty& p = m_.dtype;
    const std::uint64_t bits0 = get(at + 1, 1, "datatype.byte_order_normalization", R::FpProperty);
    p.sign_location = static_cast<std::uint8_t>(get(at + 2, 1, "datatype.sign_location", R::FpProperty));
    mark(at + 3, 1, "datatype.class_bits_reserved", R::Reserved);
    p.big_endian = bits0 & 0x01;
    p.mantissa_normalization = static_cast<std::uint8_t>((bits0 >> 4) & 0x03);
    if (bits0 & 0x40) fail(K::UnsupportedFeature, at + 1, "datatype.byte_order_normalization", "VAX order");
    p.size = static_cast<std::uint32_t>(get(at + 4, 4, "datatype.size", R::FpProperty));
    p.bit_offset = static_cast<std::uint16_t>(get(at + 8, 2, "datatype.bit_offset", R::FpProperty));
    p.bit_precision = static_cast<std::uint16_t>(get(at + 10, 2, "datatype.bit_precision", R::FpProperty));
    p.exponent_location = static_cast<std::uint8_t>(get(at + 12, 1, "datatype.exponent_location", R::FpProperty));
    p.exponent_size = static_cast<std::uint8_t>(get(at + 13, 1, "datatype.exponent_size", R::FpProperty));
    p.mantissa_location = static_cast<std::uint8_t>(get(at + 14, 1, "datatype.mantissa_location", R::FpProperty));
    p.mantissa_size = static_cast<std::uint8_t>(get(at + 15, 1, "datatype.mantissa_size", R::FpProperty));
    p.exponent_bias = static_cast<std::uint32_t>(get(at + 16, 4, "datatype.exponent_bias", R::FpProperty));
    mark(at + 20, m.size - 20, "datatype.padding", R::Reserved);
    try {
      check_decodable(p);
    } catch (const std::invalid_argument& e) {
      fail(K::UnsupportedFeature, at, "datatype", e.what());
    }
  }

  void fill_value(const Message& m) {
    const std::uint64_t at = m.at;
    if (m.size < 4) fail(K::TruncatedMessage, at, "fill_value", "short message");
    const std::uint64_t v = get(at, 1, "fill_value.version", R::Version);
    if (v != 1 && v != 2) fail(K::UnsupportedVersion, at, "fill_value.version", "fill value version");
    const std::uint64_t alloc = get(at + 1, 1, "fill_value.alloc_time", R::Other);
    const std::uint64_t when = get(at + 2, 1, "fill_value.write_time", R::Other);
    const std::uint64_t defined = get(at + 3, 1, "fill_value.defined", R::Other);
    if (alloc < 1 || alloc > 3) fail(K::InvalidValue, at + 1, "fill_value.alloc_time", "bad value");
    if (when > 2) fail(K::InvalidValue, at + 2, "fill_value.write_time", "bad value");
    if (defined > 1) fail(K::InvalidValue, at + 3, "fill_value.defined", "bad value");
    std::uint64_t used = 4;
    if (defined || v == 1) {
      if (m.size < 8) fail(K::TruncatedMessage, at + 4, "fill_value.size", "short message");
      const std::uint64_t n = get(at + 4, 4, "fill_value.size", R::Other);
      used = 8;
      if (n > 0) {
        if (n != m_.dtype.size) fail(K::InvalidValue, at + 4, "fill_value.size", "size mismatch");
        if (n > m.size - 8) fail(K::TruncatedMessage, at + 4, "fill_value.size", "fill overruns message");
        mark(at + 8, n, "fill_value.data", R::Other);
        used += n;
      }
    }
    mark(at + used, m.size - used, "fill_value.padding", R::Reserved);
  }

  void data_layout(const Message& m) {
    const std::uint64_t at = m.at;
    if (m.size < 18) fail(K::TruncatedMessage, at, "layout", "short message");
    version(at, 3, "layout.version");
    const std::uint64_t cls = get(at + 1, 1, "layout.class", R::Layout);
    if (cls != 1) fail(K::UnsupportedFeature, at + 1, "layout.class", "only contiguous storage");
    Layout& l = m_.layout;
    l.address = get(at + 2, 8, "layout.address", R::Layout);
    l.size = get(at + 10, 8, "layout.size", R::Layout);
    mark(at + 18, m.size - 18, "layout.padding", R::Reserved);

    std::uint64_t n = 1;
    for (std::size_t i = 0; i < m_.dims.size(); ++i) {
      if (m_.dims[i] != 0 && n > ~std::uint64_t{0} / m_.dims[i] / 8) {
        fail(K::InvalidValue, 0, "dataspace.dim" + std::to_string(i), "element count overflows");
      }
      n *= m_.dims[i];
    }
    if (n * m_.dtype.size > kMaxRawBytes) {
      fail(K::InvalidValue, 0, "dataspace", "dataset too large to analyze");
    }
    if (l.size < n * m_.dtype.size) {
      fail(K::InvalidValue, at + 10, "layout.size", "storage smaller than the dataspace");
    }
    resolve(l.address, at + 2, "layout.address");
  }

  ByteSpan f_;
  Hdf5Model m_;
  std::uint64_t meta_end_ = 0;
  std::uint64_t heap_data_ = 0;
  std::uint64_t heap_size_ = 0;
  std::uint64_t btree_child_at_ = 0;
  std::uint64_t dataset_addr_at_ = 0;
  std::set<std::uint64_t> strings_;
};

}  // namespace

Hdf5Model parse_file(ByteSpan file) { return Parser(file).run(); }

DensityGrid read_dataset(ByteSpan file, const Hdf5Model& model) {
  if (model.dims.size() > 3) {
    throw ParseError(ParseErrorKind::UnsupportedFeature, 0, "dataspace.rank",
                     "only ranks up to 3 are analyzable");
  }
  DensityGrid g;
  for (std::size_t i = 0; i < 3; ++i) g.dims[i] = i < model.dims.size() ? model.dims[i] : 1;
  const std::uint64_t n = model.element_count();
  const std::uint32_t es = model.dtype.size;
  g.cells.resize(n);
  check_decodable(model.dtype);
  const std::uint64_t base = model.superblock.base_address + model.layout.address;
  std::uint8_t buf[8];
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t at = base + i * es;
    if (at + es <= file.size()) {
      g.cells[i] = decode_float(model.dtype, file.subspan(at, es));
    } else {
      std::memset(buf, 0, sizeof buf);
      if (at < file.size()) std::memcpy(buf, file.data() + at, file.size() - at);
      g.cells[i] = decode_float(model.dtype, ByteSpan(buf, es));
    }
  }
  return g;
}

}  // namespace faultfs::hdf5
