// SPDX-License-Identifier: Apache-2.0
#include "faultfs/interpose/fuse_adapter.hpp"

#include <dirent.h>
#include <fcntl.h>
#include <linux/fuse.h>
#include <sys/mount.h>
#include <sys/stat.h>
#include <sys/statvfs.h>
#include <sys/uio.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "faultfs/common/error.hpp"

namespace faultfs::interpose {

namespace {

constexpr std::size_t kMaxWrite = 128 * 1024;
constexpr std::size_t kBufferSize = kMaxWrite + 4096;
// Bypass the page cache so each application write reaches the session as
// one request; buffered writes are split at page boundaries.
constexpr std::uint32_t kOpenFlags = FOPEN_DIRECT_IO;

void fill_attr(const struct stat& st, fuse_attr& a) {
  a.ino = st.st_ino;
  a.size = static_cast<std::uint64_t>(st.st_size);
  a.blocks = static_cast<std::uint64_t>(st.st_blocks);
  a.atime = static_cast<std::uint64_t>(st.st_atim.tv_sec);
  a.mtime = static_cast<std::uint64_t>(st.st_mtim.tv_sec);
  a.ctime = static_cast<std::uint64_t>(st.st_ctim.tv_sec);
  a.atimensec = static_cast<std::uint32_t>(st.st_atim.tv_nsec);
  a.mtimensec = static_cast<std::uint32_t>(st.st_mtim.tv_nsec);
  a.ctimensec = static_cast<std::uint32_t>(st.st_ctim.tv_nsec);
  a.mode = st.st_mode;
  a.nlink = static_cast<std::uint32_t>(st.st_nlink);
  a.uid = st.st_uid;
  a.gid = st.st_gid;
  a.rdev = static_cast<std::uint32_t>(st.st_rdev);
  a.blksize = static_cast<std::uint32_t>(st.st_blksize);
}

std::string child(const std::string& parent, const char* name) {
  return parent == "/" ? "/" + std::string(name) : parent + "/" + name;
}

}  // namespace

/// Node id <-> path table. Ids are never reused within a mount.
struct FuseMount::State {
  std::mutex mu;
  std::map<std::uint64_t, std::string> paths{{FUSE_ROOT_ID, "/"}};
  std::map<std::string, std::uint64_t> ids{{"/", FUSE_ROOT_ID}};
  std::uint64_t next = FUSE_ROOT_ID + 1;

  std::string path(std::uint64_t id) {
    std::lock_guard lock(mu);
    auto it = paths.find(id);
    return it == paths.end() ? std::string() : it->second;
  }

  std::uint64_t id(const std::string& p) {
    std::lock_guard lock(mu);
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    const std::uint64_t n = next++;
    ids[p] = n;
    paths[n] = p;
    return n;
  }

  void renamed(const std::string& from, const std::string& to) {
    std::lock_guard lock(mu);
    std::map<std::string, std::uint64_t> moved;
    for (auto it = ids.begin(); it != ids.end();) {
      const std::string& p = it->first;
      if (p == from || (p.size() > from.size() && p.compare(0, from.size(), from) == 0 && p[from.size()] == '/')) {
        moved[to + p.substr(from.size())] = it->second;
        it = ids.erase(it);
      } else {
        ++it;
      }
    }
    for (auto& [p, n] : moved) {
      ids[p] = n;
      paths[n] = p;
    }
  }
};

bool FuseMount::available(std::string* why) {
  const int fd = ::open("/dev/fuse", O_RDWR | O_CLOEXEC);
  if (fd < 0) {
    if (why) *why = std::string("/dev/fuse: ") + std::strerror(errno);
    return false;
  }
  ::close(fd);
  if (::geteuid() != 0) {
    if (why) *why = "mounting without libfuse's setuid helper needs root (CAP_SYS_ADMIN)";
    return false;
  }
  return true;
}

FuseMount::FuseMount(Session& session, const std::string& mountpoint, unsigned threads)
    : session_(session), mountpoint_(mountpoint), state_(new State()) {
  fd_ = ::open("/dev/fuse", O_RDWR | O_CLOEXEC);
  if (fd_ < 0) {
    delete state_;
    throw SetupError(std::string("cannot open /dev/fuse: ") + std::strerror(errno) +
                     " (load the fuse module or run with --device /dev/fuse)");
  }
  const std::string opts = "fd=" + std::to_string(fd_) + ",rootmode=40000,user_id=" +
                           std::to_string(::getuid()) + ",group_id=" + std::to_string(::getgid()) +
                           ",allow_other";
  if (::mount("faultfs", mountpoint.c_str(), "fuse.faultfs", MS_NOSUID | MS_NODEV, opts.c_str()) != 0) {
    const int e = errno;
    ::close(fd_);
    delete state_;
    throw SetupError("mount of " + mountpoint + " failed: " + std::strerror(e) +
                     (e == EPERM ? " (needs CAP_SYS_ADMIN; run as root or use the preload front end)" : ""));
  }
  for (unsigned i = 0; i < std::max(1u, threads); ++i) workers_.emplace_back([this] { serve(); });
}

FuseMount::~FuseMount() {
  stopping_ = true;
  ::umount2(mountpoint_.c_str(), MNT_DETACH);
  // Aborting the connection wakes every handler blocked in read().
  ::close(fd_);
  for (auto& t : workers_) t.join();
  delete state_;
}

void FuseMount::serve() {
  std::vector<std::uint8_t> buf(kBufferSize);
  for (;;) {
    const ssize_t n = ::read(fd_, buf.data(), buf.size());
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN || errno == ENOENT) {
        if (stopping_) return;
        continue;
      }
      return;  // ENODEV after unmount, EBADF after close
    }
    if (static_cast<std::size_t>(n) < sizeof(fuse_in_header)) continue;
    const auto* in = reinterpret_cast<const fuse_in_header*>(buf.data());
    const std::uint8_t* arg = buf.data() + sizeof(fuse_in_header);

    fuse_out_header out{};
    out.unique = in->unique;
    std::vector<std::uint8_t> payload;
    auto put = [&](const void* p, std::size_t len) {
      const auto* b = static_cast<const std::uint8_t*>(p);
      payload.insert(payload.end(), b, b + len);
    };
    bool reply = true;
    int err = 0;
    const std::string path = state_->path(in->nodeid);

    auto entry_for = [&](const std::string& p) {
      struct stat st {};
      const int rc = session_.getattr(p, st);
      if (rc < 0) return rc;
      fuse_entry_out e{};
      e.nodeid = state_->id(p);
      fill_attr(st, e.attr);
      put(&e, sizeof e);
      return 0;
    };

    switch (in->opcode) {
      case FUSE_INIT: {
        const auto* ii = reinterpret_cast<const fuse_init_in*>(arg);
        fuse_init_out io{};
        io.major = FUSE_KERNEL_VERSION;
        io.minor = std::min<std::uint32_t>(ii->minor, FUSE_KERNEL_MINOR_VERSION);
        io.max_readahead = ii->max_readahead;
        io.flags = ii->flags & (FUSE_BIG_WRITES | FUSE_MAX_PAGES);
        io.max_background = 16;
        io.congestion_threshold = 12;
        io.max_write = kMaxWrite;
        io.time_gran = 1;
        io.max_pages = kMaxWrite / 4096;
        put(&io, sizeof io);
        break;
      }
      case FUSE_DESTROY:
        break;
      case FUSE_FORGET:
      case FUSE_BATCH_FORGET:
      case FUSE_INTERRUPT:
        reply = false;
        break;
      case FUSE_LOOKUP:
        err = entry_for(child(path, reinterpret_cast<const char*>(arg)));
        break;
      case FUSE_GETATTR: {
        struct stat st {};
        err = session_.getattr(path, st);
        if (err == 0) {
          fuse_attr_out ao{};
          fill_attr(st, ao.attr);
          put(&ao, sizeof ao);
        }
        break;
      }
      case FUSE_SETATTR: {
        const auto* si = reinterpret_cast<const fuse_setattr_in*>(arg);
        if (si->valid & FATTR_MODE) err = session_.chmod(path, si->mode);
        if (!err && (si->valid & FATTR_SIZE)) err = session_.truncate(path, si->size);
        if (!err && (si->valid & (FATTR_ATIME | FATTR_MTIME))) {
          timespec ts[2] = {{0, UTIME_OMIT}, {0, UTIME_OMIT}};
          if (si->valid & FATTR_ATIME) ts[0] = {static_cast<time_t>(si->atime), static_cast<long>(si->atimensec)};
          if (si->valid & FATTR_MTIME) ts[1] = {static_cast<time_t>(si->mtime), static_cast<long>(si->mtimensec)};
          if (si->valid & FATTR_ATIME_NOW) ts[0] = {0, UTIME_NOW};
          if (si->valid & FATTR_MTIME_NOW) ts[1] = {0, UTIME_NOW};
          const std::string backing = session_.root() + path;
          if (::utimensat(AT_FDCWD, backing.c_str(), ts, AT_SYMLINK_NOFOLLOW) != 0) err = -errno;
        }
        if (!err) {
          struct stat st {};
          err = session_.getattr(path, st);
          fuse_attr_out ao{};
          fill_attr(st, ao.attr);
          if (!err) put(&ao, sizeof ao);
        }
        break;
      }
      case FUSE_OPEN: {
        const auto* oi = reinterpret_cast<const fuse_open_in*>(arg);
        // The kernel resolves append offsets; pwrite on an O_APPEND fd would
        // ignore them.
        const int fh = session_.open(path, static_cast<int>(oi->flags) & ~(O_CREAT | O_EXCL | O_NOCTTY | O_APPEND));
        if (fh < 0) {
          err = fh;
        } else {
          fuse_open_out oo{};
          oo.fh = static_cast<std::uint64_t>(fh);
          oo.open_flags = kOpenFlags;
          put(&oo, sizeof oo);
        }
        break;
      }
      case FUSE_CREATE: {
        const auto* ci = reinterpret_cast<const fuse_create_in*>(arg);
        const char* name = reinterpret_cast<const char*>(arg + sizeof(fuse_create_in));
        const std::string p = child(path, name);
        const int fh = session_.create(p, static_cast<int>(ci->flags) & ~(O_NOCTTY | O_APPEND), ci->mode);
        if (fh < 0) {
          err = fh;
          break;
        }
        err = entry_for(p);
        if (err == 0) {
          fuse_open_out oo{};
          oo.fh = static_cast<std::uint64_t>(fh);
          oo.open_flags = kOpenFlags;
          put(&oo, sizeof oo);
        } else {
          session_.release(fh);
        }
        break;
      }
      case FUSE_READ: {
        const auto* ri = reinterpret_cast<const fuse_read_in*>(arg);
        payload.resize(ri->size);
        const ssize_t r = session_.read(static_cast<int>(ri->fh), payload, ri->offset);
        if (r < 0) {
          err = static_cast<int>(r);
          payload.clear();
        } else {
          payload.resize(static_cast<std::size_t>(r));
        }
        break;
      }
      case FUSE_WRITE: {
        const auto* wi = reinterpret_cast<const fuse_write_in*>(arg);
        const ByteSpan data(arg + sizeof(fuse_write_in), wi->size);
        const ssize_t w = session_.write(static_cast<int>(wi->fh), data, wi->offset);
        if (w < 0) {
          err = static_cast<int>(w);
        } else {
          fuse_write_out wo{};
          wo.size = static_cast<std::uint32_t>(w);
          put(&wo, sizeof wo);
        }
        break;
      }
      case FUSE_FLUSH:
        break;
      case FUSE_RELEASE: {
        const auto* ri = reinterpret_cast<const fuse_release_in*>(arg);
        session_.release(static_cast<int>(ri->fh));
        break;
      }
      case FUSE_FSYNC: {
        const auto* fi = reinterpret_cast<const fuse_fsync_in*>(arg);
        err = session_.fsync(static_cast<int>(fi->fh), fi->fsync_flags & 1);
        break;
      }
      case FUSE_MKNOD: {
        const auto* mi = reinterpret_cast<const fuse_mknod_in*>(arg);
        const std::string p = child(path, reinterpret_cast<const char*>(arg + sizeof(fuse_mknod_in)));
        err = session_.mknod(p, mi->mode, mi->rdev);
        if (!err) err = entry_for(p);
        break;
      }
      case FUSE_MKDIR: {
        const auto* mi = reinterpret_cast<const fuse_mkdir_in*>(arg);
        const std::string p = child(path, reinterpret_cast<const char*>(arg + sizeof(fuse_mkdir_in)));
        err = session_.mkdir(p, mi->mode);
        if (!err) err = entry_for(p);
        break;
      }
      case FUSE_UNLINK:
        err = session_.unlink(child(path, reinterpret_cast<const char*>(arg)));
        break;
      case FUSE_RMDIR:
        err = session_.rmdir(child(path, reinterpret_cast<const char*>(arg)));
        break;
      case FUSE_RENAME:
      case FUSE_RENAME2: {
        std::uint64_t newdir = 0;
        const char* names = nullptr;
        if (in->opcode == FUSE_RENAME) {
          newdir = reinterpret_cast<const fuse_rename_in*>(arg)->newdir;
          names = reinterpret_cast<const char*>(arg + sizeof(fuse_rename_in));
        } else {
          const auto* r2 = reinterpret_cast<const fuse_rename2_in*>(arg);
          if (r2->flags != 0) {
            err = -EINVAL;
            break;
          }
          newdir = r2->newdir;
          names = reinterpret_cast<const char*>(arg + sizeof(fuse_rename2_in));
        }
        const std::string from = child(path, names);
        const std::string to = child(state_->path(newdir), names + std::strlen(names) + 1);
        err = session_.rename(from, to);
        if (!err) state_->renamed(from, to);
        break;
      }
      case FUSE_OPENDIR: {
        fuse_open_out oo{};
        put(&oo, sizeof oo);
        break;
      }
      case FUSE_READDIR: {
        const auto* ri = reinterpret_cast<const fuse_read_in*>(arg);
        std::vector<std::string> names;
        err = session_.readdir(path, names);
        if (err) break;
        for (std::size_t i = ri->offset; i < names.size(); ++i) {
          const std::size_t rec = FUSE_DIRENT_ALIGN(FUSE_NAME_OFFSET + names[i].size());
          if (payload.size() + rec > ri->size) break;
          std::vector<std::uint8_t> d(rec, 0);
          auto* de = reinterpret_cast<fuse_dirent*>(d.data());
          de->ino = 0xffffffff;  // unknown; the kernel looks entries up
          de->off = i + 1;
          de->namelen = static_cast<std::uint32_t>(names[i].size());
          de->type = DT_UNKNOWN;
          std::memcpy(d.data() + FUSE_NAME_OFFSET, names[i].data(), names[i].size());
          put(d.data(), d.size());
        }
        break;
      }
      case FUSE_RELEASEDIR:
        break;
      case FUSE_STATFS: {
        struct statvfs sv {};
        if (::statvfs(session_.root().c_str(), &sv) != 0) {
          err = -errno;
          break;
        }
        fuse_statfs_out so{};
        so.st.blocks = sv.f_blocks;
        so.st.bfree = sv.f_bfree;
        so.st.bavail = sv.f_bavail;
        so.st.files = sv.f_files;
        so.st.ffree = sv.f_ffree;
        so.st.bsize = static_cast<std::uint32_t>(sv.f_bsize);
        so.st.namelen = static_cast<std::uint32_t>(sv.f_namemax);
        so.st.frsize = static_cast<std::uint32_t>(sv.f_frsize);
        put(&so, sizeof so);
        break;
      }
      case FUSE_ACCESS:
        break;
      default:
        err = -ENOSYS;
        break;
    }
    if (!reply) continue;
    if (err) payload.clear();
    out.error = err;
    out.len = static_cast<std::uint32_t>(sizeof out + payload.size());
    iovec iov[2] = {{&out, sizeof out}, {payload.data(), payload.size()}};
    // ENOENT here means the request was interrupted; nothing to do.
    (void)!::writev(fd_, iov, payload.empty() ? 1 : 2);
  }
}

}  // namespace faultfs::interpose
